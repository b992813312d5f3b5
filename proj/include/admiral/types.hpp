#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace admiral {

// Error taxonomy used across the library. ConfigError covers anything a bad
// config or dimension mismatch can trigger (the CLI maps it to exit code 2),
// UsageError covers API misuse such as stepping a finished episode, IoError
// covers file parsing and persistence.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
  using Error::Error;
};
struct UsageError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

/// Opaque state identifier. Environments own the mapping to semantic content
/// (e.g. joint grid coordinates); ids are dense in [0, state_count) for
/// enumerable environments.
using StateId = std::int32_t;

/// One action index per agent.
using JointAction = std::vector<int>;

/// Per-agent action-space sizes of an n-player game.
class ActionSpace {
 public:
  ActionSpace() = default;
  explicit ActionSpace(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    for (int s : sizes_) {
      if (s <= 0) throw ConfigError("action space sizes must be positive");
    }
  }

  int agent_count() const { return static_cast<int>(sizes_.size()); }
  int size(int agent) const { return sizes_.at(agent); }
  const std::vector<int>& sizes() const { return sizes_; }

  /// Number of joint actions, prod_j |A^j|.
  int joint_count() const {
    long long p = 1;
    for (int s : sizes_) p *= s;
    return static_cast<int>(p);
  }

  bool operator==(const ActionSpace&) const = default;

 private:
  std::vector<int> sizes_;
};

/// Row-major flat index of a joint action (agent 0 varies slowest).
int joint_index(const JointAction& actions, const ActionSpace& space);

/// Inverse of joint_index.
JointAction joint_unindex(int flat, const ActionSpace& space);

/// One environment transition: successor state, one reward per agent and
/// whether the episode is over (either a true terminal state or the step cap).
struct EnvStep {
  StateId next_state = 0;
  std::vector<double> rewards;
  bool terminal = false;
};

/// An advisor's full strategy tuple at one state: a probability vector over
/// each agent's own actions.
class AdvisorSolution {
 public:
  AdvisorSolution() = default;
  explicit AdvisorSolution(std::vector<std::vector<double>> per_agent)
      : per_agent_(std::move(per_agent)) {}

  int agent_count() const { return static_cast<int>(per_agent_.size()); }
  const std::vector<double>& strategy(int agent) const { return per_agent_.at(agent); }
  std::vector<std::vector<double>>& strategies() { return per_agent_; }
  const std::vector<std::vector<double>>& strategies() const { return per_agent_; }

  /// Checks nonnegativity, normalization (tol 1e-9) and sizes against `space`.
  void validate(const ActionSpace& space) const;

  /// One-hot solution putting all mass on `actions`.
  static AdvisorSolution deterministic(const JointAction& actions, const ActionSpace& space);

  /// Uniform strategy for every agent.
  static AdvisorSolution uniform(const ActionSpace& space);

 private:
  std::vector<std::vector<double>> per_agent_;
};

/// The one-shot game at a fixed state: one payoff array over joint actions
/// per agent.
struct StageGame {
  ActionSpace space;
  std::vector<std::vector<double>> payoffs;  // [agent][joint action]

  void validate() const {
    if (static_cast<int>(payoffs.size()) != space.agent_count())
      throw ConfigError("stage game needs one payoff array per agent");
    for (const auto& m : payoffs)
      if (static_cast<int>(m.size()) != space.joint_count())
        throw ConfigError("stage game payoff array has wrong length");
  }
};

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace admiral
