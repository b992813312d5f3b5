#include "admiral/env.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace admiral {

void GridMazeConfig::validate() const {
  if (rows <= 0 || cols <= 0) throw ConfigError("maze dimensions must be positive");
  const int cells = rows * cols;
  auto check_cell = [&](int c, const char* what) {
    if (c < 0 || c >= cells) throw ConfigError(std::string("maze ") + what + " out of range");
  };
  check_cell(start_cells[0], "start cell");
  check_cell(start_cells[1], "start cell");
  check_cell(goal_cell, "goal cell");
  for (int p : pitfall_cells) {
    check_cell(p, "pitfall cell");
    if (p == goal_cell) throw ConfigError("pitfall coincides with goal");
  }
  for (int s : start_cells) {
    if (s == goal_cell || std::count(pitfall_cells.begin(), pitfall_cells.end(), s))
      throw ConfigError("start cell is terminal");
  }
  if (step_cap <= 0) throw ConfigError("step cap must be positive");
}

GridMazeEnv::GridMazeEnv(GridMazeConfig config)
    : config_(std::move(config)), space_({4, 4}), positions_(config_.start_cells) {
  config_.validate();
}

bool GridMazeEnv::is_pitfall(int cell) const {
  return std::count(config_.pitfall_cells.begin(), config_.pitfall_cells.end(), cell) > 0;
}

int GridMazeEnv::move_cell(int cell, int action) const {
  int r = cell / config_.cols;
  int c = cell % config_.cols;
  switch (action) {
    case kUp: r -= 1; break;
    case kDown: r += 1; break;
    case kLeft: c -= 1; break;
    case kRight: c += 1; break;
    default: throw ConfigError("maze action index out of range");
  }
  if (r < 0 || r >= config_.rows || c < 0 || c >= config_.cols) return cell;  // wall
  return r * config_.cols + c;
}

StateId GridMazeEnv::reset(Rng&) {
  positions_ = config_.start_cells;
  steps_taken_ = 0;
  done_ = false;
  return state();
}

bool GridMazeEnv::state_is_terminal(StateId s) const {
  auto cells = cells_of(s);
  for (int cell : cells)
    if (is_goal(cell) || is_pitfall(cell)) return true;
  return false;
}

void GridMazeEnv::set_state(StateId s) {
  if (s < 0 || s >= state_count()) throw ConfigError("maze state id out of range");
  positions_ = cells_of(s);
  steps_taken_ = 0;
  done_ = state_is_terminal(s);
}

EnvStep GridMazeEnv::step(const JointAction& actions) {
  if (done_) throw UsageError("step on a finished grid maze episode");
  if (static_cast<int>(actions.size()) != 2)
    throw ConfigError("grid maze expects a 2-agent joint action");

  // both moves are applied in the same tick, then the outcome is scored
  positions_ = {move_cell(positions_[0], actions[0]), move_cell(positions_[1], actions[1])};
  ++steps_taken_;

  int on_goal = 0;
  int on_pit = 0;
  for (int cell : positions_) {
    if (is_goal(cell)) ++on_goal;
    if (is_pitfall(cell)) ++on_pit;
  }

  EnvStep out;
  out.next_state = state();
  double r = 0.0;
  if (on_goal == 2) {
    r = config_.reward_both_goal;
  } else if (on_goal == 1 && on_pit == 1) {
    r = config_.reward_goal_and_pitfall;
  } else if (on_goal == 1) {
    r = config_.reward_one_goal;
  } else if (on_pit == 2) {
    r = config_.reward_both_pitfall;
  } else if (on_pit == 1) {
    r = config_.reward_one_pitfall;
  }
  out.rewards = {r, r};
  done_ = (on_goal + on_pit > 0) || steps_taken_ >= config_.step_cap;
  out.terminal = done_;
  return out;
}

int GridMazeEnv::observe(int agent) const {
  if (agent < 0 || agent >= 2) throw ConfigError("agent index out of range");
  return positions_[agent];
}

MatrixGameEnv::MatrixGameEnv(StageGame game, int horizon)
    : game_(std::move(game)), horizon_(horizon), round_(horizon) {
  game_.validate();
  if (horizon_ <= 0) throw ConfigError("matrix game horizon must be positive");
}

StateId MatrixGameEnv::reset(Rng&) {
  round_ = 0;
  return round_;
}

void MatrixGameEnv::set_state(StateId s) {
  if (s < 0 || s > horizon_) throw ConfigError("matrix game state out of range");
  round_ = s;
}

EnvStep MatrixGameEnv::step(const JointAction& actions) {
  if (done()) throw UsageError("step on a finished matrix game episode");
  int flat = joint_index(actions, game_.space);
  EnvStep out;
  out.rewards.resize(agent_count());
  for (int j = 0; j < agent_count(); ++j) out.rewards[j] = game_.payoffs[j][flat];
  ++round_;
  out.next_state = round_;
  out.terminal = done();
  return out;
}

double MatrixGameEnv::max_episode_return() const {
  double best = -std::numeric_limits<double>::infinity();
  for (int flat = 0; flat < game_.space.joint_count(); ++flat)
    best = std::max(best, game_.payoffs[0][flat]);
  return best * horizon_;
}

SingleStateDemoEnv::SingleStateDemoEnv(int step_cap, double coordination_reward,
                                       double default_reward)
    : space_({2, 2}),
      step_cap_(step_cap),
      coordination_reward_(coordination_reward),
      default_reward_(default_reward),
      steps_taken_(step_cap) {
  if (step_cap <= 0) throw ConfigError("step cap must be positive");
}

StateId SingleStateDemoEnv::reset(Rng&) {
  steps_taken_ = 0;
  return 0;
}

void SingleStateDemoEnv::set_state(StateId s) {
  if (s != 0) throw ConfigError("single state demo has exactly one state");
  steps_taken_ = 0;
}

EnvStep SingleStateDemoEnv::step(const JointAction& actions) {
  if (done()) throw UsageError("step on a finished demo episode");
  int flat = joint_index(actions, space_);
  double r = flat == 0 ? coordination_reward_ : default_reward_;
  ++steps_taken_;
  return {0, {r, r}, done()};
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

}  // namespace

GridMazeConfig load_maze_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open environment file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("bad environment file " + path + ": " + e.what());
  }
  reject_unknown_keys(j,
                      {"format_version", "rows", "cols", "start_cells", "goal_cell",
                       "pitfall_cells", "step_cap", "rewards"},
                      path);
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
    throw ConfigError("environment file must declare format_version 1");

  GridMazeConfig c;
  try {
    c.rows = j.value("rows", c.rows);
    c.cols = j.value("cols", c.cols);
    if (j.contains("start_cells")) {
      auto v = j["start_cells"].get<std::vector<int>>();
      if (v.size() != 2) throw ConfigError("start_cells must list exactly two cells");
      c.start_cells = {v[0], v[1]};
    }
    c.goal_cell = j.value("goal_cell", c.goal_cell);
    if (j.contains("pitfall_cells")) c.pitfall_cells = j["pitfall_cells"].get<std::vector<int>>();
    c.step_cap = j.value("step_cap", c.step_cap);
    if (j.contains("rewards")) {
      const auto& r = j["rewards"];
      reject_unknown_keys(r, {"one_goal", "one_pitfall", "both_goal", "both_pitfall",
                              "goal_and_pitfall"},
                          path + ":rewards");
      c.reward_one_goal = r.value("one_goal", c.reward_one_goal);
      c.reward_one_pitfall = r.value("one_pitfall", c.reward_one_pitfall);
      c.reward_both_goal = r.value("both_goal", c.reward_both_goal);
      c.reward_both_pitfall = r.value("both_pitfall", c.reward_both_pitfall);
      c.reward_goal_and_pitfall = r.value("goal_and_pitfall", c.reward_goal_and_pitfall);
    }
  } catch (const json::exception& e) {
    throw ConfigError("bad environment file " + path + ": " + e.what());
  }
  c.validate();
  return c;
}

void save_maze_config(const GridMazeConfig& config, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["rows"] = config.rows;
  j["cols"] = config.cols;
  j["start_cells"] = std::vector<int>{config.start_cells[0], config.start_cells[1]};
  j["goal_cell"] = config.goal_cell;
  j["pitfall_cells"] = config.pitfall_cells;
  j["step_cap"] = config.step_cap;
  j["rewards"] = {{"one_goal", config.reward_one_goal},
                  {"one_pitfall", config.reward_one_pitfall},
                  {"both_goal", config.reward_both_goal},
                  {"both_pitfall", config.reward_both_pitfall},
                  {"goal_and_pitfall", config.reward_goal_and_pitfall}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write environment file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace admiral
