#pragma once

#include <span>

#include "admiral/rng.hpp"
#include "admiral/types.hpp"

namespace admiral {

/// Joint-action value table of a single agent: for every state a dense flat
/// array over joint actions in row-major order (agent 0 slowest). Freshly
/// created tables are all-zero.
class JointQTable {
 public:
  JointQTable() = default;
  JointQTable(int agent_index, int state_count, ActionSpace space)
      : agent_index_(agent_index),
        state_count_(state_count),
        space_(std::move(space)),
        data_(static_cast<std::size_t>(state_count) * space_.joint_count(), 0.0) {
    if (state_count < 0) throw ConfigError("negative state count");
  }

  int agent_index() const { return agent_index_; }
  int state_count() const { return state_count_; }
  const ActionSpace& space() const { return space_; }
  int joint_count() const { return space_.joint_count(); }

  double at(StateId s, int flat) const { return data_[offset(s, flat)]; }
  double at(StateId s, const JointAction& a) const { return at(s, joint_index(a, space_)); }
  void set(StateId s, int flat, double v) { data_[offset(s, flat)] = v; }
  void set(StateId s, const JointAction& a, double v) { set(s, joint_index(a, space_), v); }

  std::span<const double> slice(StateId s) const {
    return {data_.data() + offset(s, 0), static_cast<std::size_t>(joint_count())};
  }
  std::span<double> slice(StateId s) {
    return {data_.data() + offset(s, 0), static_cast<std::size_t>(joint_count())};
  }

  const std::vector<double>& raw() const { return data_; }
  std::vector<double>& raw() { return data_; }

  bool same_shape(const JointQTable& other) const {
    return state_count_ == other.state_count_ && space_ == other.space_;
  }

  bool operator==(const JointQTable&) const = default;

 private:
  std::size_t offset(StateId s, int flat) const {
    if (s < 0 || s >= state_count_) throw ConfigError("state id out of range");
    if (flat < 0 || flat >= joint_count()) throw ConfigError("joint action index out of range");
    return static_cast<std::size_t>(s) * joint_count() + flat;
  }

  int agent_index_ = 0;
  int state_count_ = 0;
  ActionSpace space_;
  std::vector<double> data_;
};

/// Expected payoff when every agent plays its advisor-solution strategy:
/// sum over joint actions a of [prod_j sigma_j(a_j)] * q(a).
///
/// `q_slice` is one agent's per-joint-action values at one state, row-major.
double advisor_q(const AdvisorSolution& solution, std::span<const double> q_slice,
                 const ActionSpace& space);

/// Greedy own action of `agent` with all other agents' actions held fixed.
/// `others` must be a full joint action; the agent's own slot is ignored.
/// Ties are broken uniformly at random via `rng`.
int greedy_own_action(const JointQTable& table, StateId state, const JointAction& others,
                      int agent, Rng& rng);

}  // namespace admiral
