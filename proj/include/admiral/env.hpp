#pragma once

#include <array>
#include <memory>
#include <string>

#include "admiral/rng.hpp"
#include "admiral/types.hpp"

namespace admiral {

/// N-player stochastic game with enumerable states. Implementations are
/// plain single-threaded values; clone() gives oracles an independent copy.
class Env {
 public:
  virtual ~Env() = default;

  virtual int agent_count() const = 0;
  virtual const ActionSpace& action_space() const = 0;
  virtual int state_count() const = 0;

  /// Starts a new episode and returns the initial state.
  virtual StateId reset(Rng& rng) = 0;

  /// Applies a joint action. Throws UsageError when the episode is over.
  virtual EnvStep step(const JointAction& actions) = 0;

  virtual StateId state() const = 0;
  virtual bool done() const = 0;

  /// Whether `s` is absorbing in the underlying game (as opposed to an
  /// episode that merely ran out of steps). Learners bootstrap through
  /// step-cap truncation but not through true terminal states.
  virtual bool state_is_terminal(StateId s) const = 0;

  /// Teleports to an arbitrary state with a fresh step budget; used by the
  /// brute-force value oracles.
  virtual void set_state(StateId s) = 0;

  /// Joint view: the full StateId. Local view: the agent's own observation id.
  virtual int observe(int agent) const = 0;
  virtual int local_observation_count() const = 0;

  /// Largest total return any policy can collect in one episode (identical
  /// for all agents in the shipped environments).
  virtual double max_episode_return() const = 0;

  virtual int step_cap() const = 0;
  virtual std::string name() const = 0;
  virtual std::unique_ptr<Env> clone() const = 0;
};

struct GridMazeConfig {
  int rows = 5;
  int cols = 5;
  std::array<int, 2> start_cells = {10, 14};  // row-major cell ids, agent 0 and 1
  int goal_cell = 22;
  std::vector<int> pitfall_cells = {6, 8, 12, 17};
  int step_cap = 100;
  // reward constants, in the order they appear in the rules below
  double reward_one_goal = 1.0;
  double reward_one_pitfall = -1.0;
  double reward_both_goal = 2.0;
  double reward_both_pitfall = -2.0;
  double reward_goal_and_pitfall = 1.0;

  void validate() const;
};

/// Two agents on a small grid racing to a shared goal while avoiding
/// pitfalls. Moves are simultaneous; a move into the outer wall leaves the
/// agent in place. The episode ends as soon as either agent stands on the
/// goal or a pitfall:
///   exactly one on goal            -> (+1, +1)
///   exactly one on pitfall         -> (-1, -1)
///   both on goal                   -> (+2, +2)
///   both on pitfalls               -> (-2, -2)
///   one on goal + one on pitfall   -> (+1, +1)
/// State ids enumerate the joint cell positions (agent 0 slowest).
class GridMazeEnv final : public Env {
 public:
  enum Action { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

  explicit GridMazeEnv(GridMazeConfig config = {});

  int agent_count() const override { return 2; }
  const ActionSpace& action_space() const override { return space_; }
  int state_count() const override { return cell_count() * cell_count(); }

  StateId reset(Rng& rng) override;
  EnvStep step(const JointAction& actions) override;
  StateId state() const override { return joint_id(positions_); }
  bool done() const override { return done_; }
  bool state_is_terminal(StateId s) const override;
  void set_state(StateId s) override;

  int observe(int agent) const override;
  int local_observation_count() const override { return cell_count(); }
  double max_episode_return() const override { return config_.reward_both_goal; }
  int step_cap() const override { return config_.step_cap; }
  std::string name() const override { return "grid_maze"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<GridMazeEnv>(*this); }

  const GridMazeConfig& config() const { return config_; }
  int cell_count() const { return config_.rows * config_.cols; }
  bool is_pitfall(int cell) const;
  bool is_goal(int cell) const { return cell == config_.goal_cell; }

  /// Where a single move from `cell` lands (walls block).
  int move_cell(int cell, int action) const;

  StateId joint_id(const std::array<int, 2>& cells) const {
    return cells[0] * cell_count() + cells[1];
  }
  std::array<int, 2> cells_of(StateId s) const {
    return {static_cast<int>(s) / cell_count(), static_cast<int>(s) % cell_count()};
  }

 private:
  GridMazeConfig config_;
  ActionSpace space_;
  std::array<int, 2> positions_;
  int steps_taken_ = 0;
  bool done_ = true;
};

/// Repeated matrix game: one payoff entry per agent per joint action, played
/// for `horizon` rounds. The round index is part of the state so that the
/// final round is a true terminal transition (for horizon 1 the optimal Q
/// equals the payoff table exactly).
class MatrixGameEnv final : public Env {
 public:
  MatrixGameEnv(StageGame game, int horizon = 1);

  int agent_count() const override { return game_.space.agent_count(); }
  const ActionSpace& action_space() const override { return game_.space; }
  int state_count() const override { return horizon_ + 1; }

  StateId reset(Rng& rng) override;
  EnvStep step(const JointAction& actions) override;
  StateId state() const override { return round_; }
  bool done() const override { return round_ >= horizon_; }
  bool state_is_terminal(StateId s) const override { return s >= horizon_; }
  void set_state(StateId s) override;

  int observe(int) const override { return round_; }
  int local_observation_count() const override { return state_count(); }
  double max_episode_return() const override;
  int step_cap() const override { return horizon_; }
  std::string name() const override { return "matrix_game"; }
  std::unique_ptr<Env> clone() const override { return std::make_unique<MatrixGameEnv>(*this); }

  const StageGame& game() const { return game_; }

 private:
  StageGame game_;
  int horizon_;
  StateId round_ = 0;
};

/// Single-state repeated game for two agents with two actions each
/// (Up/Down x Left/Right). Joint action (Up, Left) pays both agents
/// `coordination_reward`; every other joint action pays `default_reward`.
/// The episode never terminates on its own; it is truncated at `step_cap`
/// (learners bootstrap through the truncation).
class SingleStateDemoEnv final : public Env {
 public:
  explicit SingleStateDemoEnv(int step_cap = 1000, double coordination_reward = 2.0,
                              double default_reward = 0.0);

  int agent_count() const override { return 2; }
  const ActionSpace& action_space() const override { return space_; }
  int state_count() const override { return 1; }

  StateId reset(Rng& rng) override;
  EnvStep step(const JointAction& actions) override;
  StateId state() const override { return 0; }
  bool done() const override { return steps_taken_ >= step_cap_; }
  bool state_is_terminal(StateId) const override { return false; }
  void set_state(StateId s) override;

  int observe(int) const override { return 0; }
  int local_observation_count() const override { return 1; }
  double max_episode_return() const override { return coordination_reward_ * step_cap_; }
  int step_cap() const override { return step_cap_; }
  std::string name() const override { return "single_state_demo"; }
  std::unique_ptr<Env> clone() const override {
    return std::make_unique<SingleStateDemoEnv>(*this);
  }

 private:
  ActionSpace space_;
  int step_cap_;
  double coordination_reward_;
  double default_reward_;
  int steps_taken_ = 0;
};

/// Environment description file (JSON with a format_version field).
GridMazeConfig load_maze_config(const std::string& path);
void save_maze_config(const GridMazeConfig& config, const std::string& path);

}  // namespace admiral
