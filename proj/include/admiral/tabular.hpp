#pragma once

#include <functional>

#include "admiral/advisors.hpp"
#include "admiral/env.hpp"
#include "admiral/qtable.hpp"

namespace admiral {

/// Linear decay over episodes: value(e) = start - (start-end)*min(e/horizon, 1).
struct Schedule {
  double start = 0.0;
  double end = 0.0;
  long horizon = 1;

  double value(long episode) const {
    if (!(end >= 0.0) || !(start >= end) || start > 1.0)
      throw ConfigError("schedule needs 0 <= end <= start <= 1");
    if (horizon <= 0) return end;
    double frac = std::min(static_cast<double>(episode) / static_cast<double>(horizon), 1.0);
    return start - (start - end) * frac;
  }

  static Schedule constant(double v) { return {v, v, 1}; }
};

struct DmConfig {
  double alpha = 0.1;
  double beta = 0.9;
  Schedule epsilon = Schedule::constant(0.0);        // random exploration
  Schedule epsilon_prime = Schedule::constant(0.0);  // advisor influence

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
  }
};

struct AeConfig {
  double alpha = 0.9;
  double beta = 0.9;
  double eta = 0.05;       // random action probability, fixed
  double eta_prime = 0.5;  // advisor action probability, fixed

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0,1)");
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
    if (eta < 0.0 || eta_prime < 0.0 || eta + eta_prime > 1.0)
      throw ConfigError("need eta, eta' >= 0 and eta + eta' <= 1");
  }
};

/// Sarsa-style joint-action update:
///   Q(s,a) <- (1-alpha) Q(s,a) + alpha [r + beta * Q(s',a')]
/// Returns the new value at (s,a); only that entry changes. Pass
/// bootstrap=false on transitions into true terminal states.
double dm_update(JointQTable& q, StateId s, const JointAction& a, double reward, StateId s_next,
                 const JointAction& a_next, double alpha, double beta, bool bootstrap = true);

/// Advisor-evaluation update:
///   Q(s,a) <- (1-alpha) Q(s,a) + alpha [r + beta * AdvisorQ(s')]
/// where AdvisorQ contracts the agent's own Q slice at s' with the advisor
/// solution.
double ae_update(JointQTable& q, StateId s, const JointAction& a, double reward,
                 const AdvisorSolution& solution_next, StateId s_next, double alpha, double beta,
                 bool bootstrap = true);

/// Three-way behaviour mixture shared by both algorithms: advisor action
/// with probability p_advisor, uniform random with p_random, otherwise the
/// greedy own action with the other agents' actions held at `others`.
int select_mixed_action(const JointQTable& q, const Env& env, StateId state,
                        const JointAction& others, int agent, Advisor* advisor, double p_advisor,
                        double p_random, Rng& rng);

/// Maps an advisor-evaluation score onto the initial advisor-influence
/// probability: (cr-rcr)/(mcr-rcr), clamped to [0,1], then rounded up to the
/// next 0.1 (values within 0.005 of a 0.1 multiple collapse to it, absorbing
/// the rounding already present in reported cumulative rewards). The result
/// is always one of {0.0, 0.1, ..., 1.0}.
double normalize_epsilon0(double cr, double rcr, double mcr);

struct EpisodeRecord {
  long episode = 0;
  std::vector<double> rewards;  // summed over the episode, per agent
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
  double mse_to_oracle = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  std::vector<EpisodeRecord> episodes;
  std::vector<JointQTable> tables;  // one per agent
  long total_steps = 0;
};

struct TrainHooks {
  /// Called at episode end with the per-agent tables; the result lands in
  /// EpisodeRecord::mse_to_oracle.
  std::function<double(const std::vector<JointQTable>&)> mse_probe;
  /// Restricts when the probe runs (default: every episode).
  std::function<bool(long episode)> mse_when;
  /// Called after the updates of every step. For train_dm, views[j][k] is
  /// agent j's table of agent k (j == k being agent j's own); train_ae passes
  /// a single row with the agents' own tables.
  std::function<void(const std::vector<std::vector<JointQTable>>& views)> step_probe;
  /// Stop once no Q entry moved more than this over a whole episode.
  bool early_stop = false;
  double early_stop_tol = 1e-6;
};

/// Tabular decision-making training. All agents run the same algorithm; each
/// agent keeps its own table plus live copies of every other agent's table,
/// updated identically from the shared observations. `advisors` is either
/// empty or holds one advisor per agent. Joint observations are used as the
/// state.
TrainResult train_dm(Env& env, const std::vector<Advisor*>& advisors, const DmConfig& config,
                     long episodes, Rng& rng, const TrainHooks& hooks = {});

/// Tabular advisor-evaluation training: a single shared advisor, fixed
/// eta/eta', off-policy updates against the advisor solution at s'.
TrainResult train_ae(Env& env, Advisor& advisor, const AeConfig& config, long episodes, Rng& rng,
                     const TrainHooks& hooks = {});

}  // namespace admiral
