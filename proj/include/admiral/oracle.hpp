#pragma once

#include "admiral/advisors.hpp"
#include "admiral/env.hpp"
#include "admiral/qtable.hpp"

namespace admiral {

struct OracleConfig {
  double beta = 0.9;
  int rollouts = 512;   // per (s,a) when the advisor behaves stochastically
  int horizon = -1;     // -1: use the environment's step cap
  double tolerance = 1e-10;
  long enumeration_budget = 100000;  // episode-tree nodes before falling back
                                     // to Monte Carlo

  void validate() const {
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
    if (rollouts < 1) throw ConfigError("rollout count must be at least 1");
    if (tolerance <= 0.0) throw ConfigError("tolerance must be positive");
  }
};

/// Brute-force value of the advisor: for every (s, a), execute a once from s
/// and then let all agents follow the advisor solution until termination or
/// the horizon, discounting by beta. Expectations are exact (episode-tree
/// enumeration) whenever the tree fits the node budget, otherwise averaged
/// over `rollouts` Monte Carlo trajectories. Returns one table per agent.
std::vector<JointQTable> advisor_value_q(const Env& env, Advisor& advisor,
                                         const OracleConfig& config, Rng& rng);

/// Joint value iteration for identical-interest games:
///   Q(s,a) = r(s,a) + beta * max_{a'} Q(s',a')
/// iterated to a sup-norm change below `tolerance`. Requires a deterministic,
/// enumerable environment whose agents always receive equal rewards (checked;
/// anything else is rejected). Every agent shares the returned table.
JointQTable nash_q_identical_interest(const Env& env, double beta, double tolerance);

/// Expected per-agent discounted return when every agent follows the advisor
/// from `state` (no forced first action). Same enumeration/rollout policy as
/// advisor_value_q.
std::vector<double> advisor_policy_value(const Env& env, Advisor& advisor,
                                         const OracleConfig& config, StateId state, Rng& rng);

/// Mean squared difference over all (state, joint action) entries.
double mse(const JointQTable& a, const JointQTable& b);

/// Largest |Q(s,a) - (r + beta * max_{a'} Q(s',a'))| over non-terminal
/// states; a converged table keeps this below the iteration tolerance.
double bellman_residual(const Env& env, const JointQTable& q, double beta);

}  // namespace admiral
