#pragma once

#include <limits>
#include <memory>

#include "admiral/env.hpp"
#include "admiral/qtable.hpp"

namespace admiral {

/// External action-recommendation source. `solve` returns the full n-agent
/// strategy tuple at a state; `recommend` samples one action for one agent
/// from that strategy (so its empirical distribution matches the marginal).
/// Adaptive advisors track episode boundaries through on_episode_end().
class Advisor {
 public:
  virtual ~Advisor() = default;

  virtual AdvisorSolution solve(const Env& env, StateId state) = 0;

  virtual int recommend(const Env& env, StateId state, int agent, Rng& rng) {
    AdvisorSolution sol = solve(env, state);
    return rng.sample(sol.strategy(agent));
  }

  virtual void on_episode_end() {}

  virtual std::unique_ptr<Advisor> clone() const = 0;
};

/// Uniform-random recommendations for every agent.
class RandomAdvisor final : public Advisor {
 public:
  AdvisorSolution solve(const Env& env, StateId) override {
    return AdvisorSolution::uniform(env.action_space());
  }
  std::unique_ptr<Advisor> clone() const override { return std::make_unique<RandomAdvisor>(); }
};

/// Rule-based grid maze advisors of decreasing quality.
///   grade 1: shortest-path action toward the goal treating pitfalls as
///            walls, at every cell (deterministic; ties broken by the fixed
///            action order so the strategy is one-hot everywhere)
///   grade 2: the grade-1 action, but only when the agent is within one step
///            of the goal or of a pitfall; uniform random elsewhere
///   grade 3: uniform over the actions that reduce Manhattan distance to the
///            goal, ignoring pitfalls entirely
///   grade 4: uniform random everywhere
class MazeAdvisor final : public Advisor {
 public:
  MazeAdvisor(const GridMazeEnv& env, int grade);

  AdvisorSolution solve(const Env& env, StateId state) override;
  std::unique_ptr<Advisor> clone() const override { return std::make_unique<MazeAdvisor>(*this); }

  int grade() const { return grade_; }

  /// Per-cell strategy over the four moves, as solve() reports it.
  const std::vector<double>& cell_strategy(int cell) const { return per_cell_.at(cell); }

 private:
  int grade_;
  int cell_count_;
  std::vector<std::vector<double>> per_cell_;  // [cell][action]
};

std::unique_ptr<Advisor> make_maze_advisor(const GridMazeEnv& env, int grade);

/// Behaves like the grade-4 (random) advisor for the first `switch_episode`
/// completed episodes and like the grade-1 advisor afterwards; models an
/// advisor that improves while it is being evaluated. Pass
/// ScriptedAdaptiveAdvisor::kNever to keep it random forever.
class ScriptedAdaptiveAdvisor final : public Advisor {
 public:
  static constexpr long kNever = std::numeric_limits<long>::max();

  ScriptedAdaptiveAdvisor(const GridMazeEnv& env, long switch_episode);

  AdvisorSolution solve(const Env& env, StateId state) override;
  void on_episode_end() override { ++episodes_seen_; }
  std::unique_ptr<Advisor> clone() const override {
    return std::make_unique<ScriptedAdaptiveAdvisor>(*this);
  }

  long episodes_seen() const { return episodes_seen_; }

 private:
  long switch_episode_;
  long episodes_seen_ = 0;
  MazeAdvisor weak_;
  MazeAdvisor strong_;
};

/// Replays a fixed list of (recommended joint action, solution) pairs, one
/// per solve() call; the last entry repeats once the script runs out. Drives
/// the hand-computed update traces in the tests exactly.
class ScriptedSequenceAdvisor final : public Advisor {
 public:
  struct Entry {
    JointAction recommended;
    AdvisorSolution solution;
  };

  explicit ScriptedSequenceAdvisor(std::vector<Entry> script) : script_(std::move(script)) {
    if (script_.empty()) throw ConfigError("scripted advisor needs at least one entry");
  }

  AdvisorSolution solve(const Env&, StateId) override {
    const Entry& e = script_[std::min(cursor_, script_.size() - 1)];
    ++cursor_;
    return e.solution;
  }

  int recommend(const Env&, StateId, int agent, Rng&) override {
    // recommendations follow the script position without consuming it
    const Entry& e = script_[std::min(cursor_, script_.size() - 1)];
    return e.recommended.at(agent);
  }

  std::unique_ptr<Advisor> clone() const override {
    return std::make_unique<ScriptedSequenceAdvisor>(*this);
  }

 private:
  std::vector<Entry> script_;
  std::size_t cursor_ = 0;
};

}  // namespace admiral
