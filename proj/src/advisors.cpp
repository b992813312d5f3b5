#include "admiral/advisors.hpp"

#include <algorithm>
#include <deque>

namespace admiral {

namespace {

// BFS distances to the goal over single-agent cells, pitfalls treated as
// walls. Unreachable cells keep a large sentinel.
std::vector<int> bfs_goal_distances(const GridMazeEnv& env) {
  const int cells = env.cell_count();
  std::vector<int> dist(cells, std::numeric_limits<int>::max());
  std::deque<int> frontier;
  dist[env.config().goal_cell] = 0;
  frontier.push_back(env.config().goal_cell);
  while (!frontier.empty()) {
    int cell = frontier.front();
    frontier.pop_front();
    for (int a = 0; a < 4; ++a) {
      int next = env.move_cell(cell, a);
      if (next == cell || env.is_pitfall(next)) continue;
      if (dist[next] > dist[cell] + 1) {
        dist[next] = dist[cell] + 1;
        frontier.push_back(next);
      }
    }
  }
  return dist;
}

int manhattan(const GridMazeEnv& env, int cell, int target) {
  int cols = env.config().cols;
  return std::abs(cell / cols - target / cols) + std::abs(cell % cols - target % cols);
}

std::vector<double> uniform4() { return {0.25, 0.25, 0.25, 0.25}; }

// One-hot on the first action whose successor minimizes the BFS distance and
// is not a pitfall. Falls back to uniform where the goal is unreachable.
std::vector<double> grade1_strategy(const GridMazeEnv& env, const std::vector<int>& dist,
                                    int cell) {
  int best_action = -1;
  long best = std::numeric_limits<long>::max();
  for (int a = 0; a < 4; ++a) {
    int next = env.move_cell(cell, a);
    if (env.is_pitfall(next)) continue;
    if (dist[next] < best) {
      best = dist[next];
      best_action = a;
    }
  }
  if (best_action < 0 || best == std::numeric_limits<int>::max()) return uniform4();
  std::vector<double> p(4, 0.0);
  p[best_action] = 1.0;
  return p;
}

std::vector<double> grade3_strategy(const GridMazeEnv& env, int cell) {
  int goal = env.config().goal_cell;
  std::vector<int> reducing;
  for (int a = 0; a < 4; ++a) {
    int next = env.move_cell(cell, a);
    if (next != cell && manhattan(env, next, goal) < manhattan(env, cell, goal))
      reducing.push_back(a);
  }
  if (reducing.empty()) return uniform4();
  std::vector<double> p(4, 0.0);
  for (int a : reducing) p[a] = 1.0 / reducing.size();
  return p;
}

bool within_one_step_of_terminal(const GridMazeEnv& env, int cell) {
  if (manhattan(env, cell, env.config().goal_cell) <= 1) return true;
  for (int pit : env.config().pitfall_cells)
    if (manhattan(env, cell, pit) <= 1) return true;
  return false;
}

}  // namespace

MazeAdvisor::MazeAdvisor(const GridMazeEnv& env, int grade)
    : grade_(grade), cell_count_(env.cell_count()) {
  if (grade < 1 || grade > 4) throw ConfigError("maze advisor grade must be in 1..4");
  auto dist = bfs_goal_distances(env);
  per_cell_.resize(cell_count_);
  for (int cell = 0; cell < cell_count_; ++cell) {
    switch (grade_) {
      case 1:
        per_cell_[cell] = grade1_strategy(env, dist, cell);
        break;
      case 2:
        per_cell_[cell] = within_one_step_of_terminal(env, cell)
                              ? grade1_strategy(env, dist, cell)
                              : uniform4();
        break;
      case 3:
        per_cell_[cell] = grade3_strategy(env, cell);
        break;
      default:
        per_cell_[cell] = uniform4();
        break;
    }
  }
}

AdvisorSolution MazeAdvisor::solve(const Env& env, StateId state) {
  const auto* maze = dynamic_cast<const GridMazeEnv*>(&env);
  if (maze == nullptr) throw ConfigError("maze advisor needs a grid maze environment");
  auto cells = maze->cells_of(state);
  std::vector<std::vector<double>> per_agent;
  per_agent.reserve(cells.size());
  for (int cell : cells) per_agent.push_back(per_cell_.at(cell));
  return AdvisorSolution(std::move(per_agent));
}

std::unique_ptr<Advisor> make_maze_advisor(const GridMazeEnv& env, int grade) {
  return std::make_unique<MazeAdvisor>(env, grade);
}

ScriptedAdaptiveAdvisor::ScriptedAdaptiveAdvisor(const GridMazeEnv& env, long switch_episode)
    : switch_episode_(switch_episode), weak_(env, 4), strong_(env, 1) {
  if (switch_episode < 0) throw ConfigError("switch episode must be nonnegative");
}

AdvisorSolution ScriptedAdaptiveAdvisor::solve(const Env& env, StateId state) {
  return episodes_seen_ < switch_episode_ ? weak_.solve(env, state) : strong_.solve(env, state);
}

}  // namespace admiral
