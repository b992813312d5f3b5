#pragma once

#include "admiral/advisors.hpp"
#include "admiral/env.hpp"
#include "admiral/mlp.hpp"
#include "admiral/tabular.hpp"

namespace admiral {

/// Replay record: states and joint actions in flat encoding, one reward per
/// agent. `a_next` holds whatever the algorithm stores there (selected next
/// actions for decision-making, advisor-recommended actions for evaluation).
struct Transition {
  StateId s = 0;
  int a = 0;
  std::vector<double> rewards;
  StateId s_next = 0;
  int a_next = 0;
  bool into_terminal = false;
};

/// Fixed-capacity FIFO ring with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
  }

  void push(Transition t) {
    if (ring_.size() < capacity_) {
      ring_.push_back(std::move(t));
    } else {
      ring_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return capacity_; }

  const Transition& sample(Rng& rng) const {
    if (ring_.empty()) throw UsageError("sampling from an empty replay buffer");
    return ring_[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(ring_.size())))];
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;
  std::vector<Transition> ring_;
};

struct DmNnConfig {
  std::vector<int> hidden = {64, 64};
  double beta = 0.9;
  double learning_rate = 0.01;
  int batch_size = 32;
  std::size_t buffer_capacity = 200000;
  int target_sync_period = 10;   // learning iterations between target copies
  int updates_per_episode = -1;  // -1: one minibatch per environment step
  Schedule epsilon = Schedule::constant(0.0);
  Schedule epsilon_prime = Schedule::constant(0.0);
  double divergence_guard = 1e6;

  void validate() const;
};

struct AeNnConfig {
  std::vector<int> hidden = {64, 64};
  double beta = 0.9;
  double learning_rate = 0.01;
  int batch_size = 32;
  std::size_t buffer_capacity = 200000;
  int target_sync_period = 10;
  int updates_per_episode = -1;
  double eta = 0.05;
  double eta_prime = 0.5;
  double divergence_guard = 1e6;

  void validate() const;
};

struct AcConfig {
  std::vector<int> hidden = {64, 64};
  double beta = 0.9;
  double critic_learning_rate = 1e-3;
  double actor_learning_rate = 1e-5;
  Schedule epsilon_prime = Schedule::constant(0.0);
  bool actor_local_obs = true;  // actors read the agent's local observation
  // Scale the actor's log-probability gradient by the critic's squared loss
  // (the default) or by the signed TD error.
  bool advantage_signal = false;
  double probability_floor = 1e-8;

  void validate() const;
};

struct NnTrainResult {
  std::vector<EpisodeRecord> episodes;
  std::vector<Mlp> eval_nets;    // one per agent
  std::vector<Mlp> target_nets;  // one per agent
  long total_steps = 0;
};

/// Critic/actor pair of a single agent.
struct AcPair {
  Mlp critic;
  Mlp actor;
};

struct AcTrainResult {
  std::vector<EpisodeRecord> episodes;
  std::vector<AcPair> agents;
  long total_steps = 0;
};

struct NnHooks {
  /// Called after every learning iteration (post target sync if one fired).
  std::function<void(long update_index, const std::vector<Mlp>& eval,
                     const std::vector<Mlp>& target)>
      update_probe;
};

/// Deep decision-making training: one-hot joint state in, per-joint-action
/// values out, eval/target pair per agent, shared replay buffer, minibatch
/// TD updates at episode end. Greedy action selection conditions on the
/// observed current actions of the other agents.
NnTrainResult train_dm_nn(Env& env, const std::vector<Advisor*>& advisors,
                          const DmNnConfig& config, long episodes, Rng& rng,
                          const NnHooks& hooks = {});

/// Deep advisor evaluation: the stored next actions are the advisor's
/// recommendations and the TD target contracts the target net's output with
/// the advisor solution at s'.
NnTrainResult train_ae_nn(Env& env, Advisor& advisor, const AeNnConfig& config, long episodes,
                          Rng& rng, const NnHooks& hooks = {});

/// Actor-critic decision-making: a centralized critic per agent (state plus
/// the other agents' actions) and a decentralized softmax actor, updated
/// online from each transition. Exploration comes from the stochastic actor
/// itself plus the decaying advisor probability.
AcTrainResult train_dm_ac(Env& env, const std::vector<Advisor*>& advisors, const AcConfig& config,
                          long episodes, Rng& rng);

/// Softmax with the probability floor applied, as the actor uses it.
std::vector<double> actor_policy(Mlp& actor, std::span<const double> obs, double floor);

/// One policy-gradient step: moves the log-probability of `action` at `obs`
/// by `signal` (reinforcing when the signal is positive; a zero signal is a
/// no-op by construction).
void actor_reinforce_update(Mlp& actor, std::span<const double> obs, int action, double signal,
                            double learning_rate, double floor);

/// Decentralized execution: every agent samples from its trained actor; no
/// advisor, no learning. Returns the mean per-episode return per agent.
std::vector<double> evaluate_actors(Env& env, std::vector<AcPair>& agents, const AcConfig& config,
                                    long episodes, Rng& rng);

}  // namespace admiral
