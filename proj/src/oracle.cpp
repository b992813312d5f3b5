#include "admiral/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace admiral {

namespace {

struct EnumerationBudgetExceeded {};

// Expected per-agent discounted return of following the advisor from `state`
// for `steps_left` more steps, by expanding every joint action with nonzero
// probability. Throws once more than `budget` nodes were expanded.
std::vector<double> enumerate_value(Env& env, Advisor& advisor, StateId state, int steps_left,
                                    double beta, long& budget) {
  const int n = env.agent_count();
  std::vector<double> value(n, 0.0);
  if (steps_left <= 0 || env.state_is_terminal(state)) return value;

  AdvisorSolution solution = advisor.solve(env, state);
  const ActionSpace& space = env.action_space();
  JointAction a(n, 0);
  for (int flat = 0; flat < space.joint_count(); ++flat) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) w *= solution.strategy(j)[a[j]];
    if (w > 0.0) {
      if (--budget < 0) throw EnumerationBudgetExceeded{};
      env.set_state(state);
      EnvStep stepped = env.step(a);
      std::vector<double> future =
          enumerate_value(env, advisor, stepped.next_state, steps_left - 1, beta, budget);
      for (int j = 0; j < n; ++j) value[j] += w * (stepped.rewards[j] + beta * future[j]);
    }
    for (int j = n - 1; j >= 0; --j) {
      if (++a[j] < space.size(j)) break;
      a[j] = 0;
    }
  }
  return value;
}

// One sampled advisor-following trajectory from `state`.
std::vector<double> rollout_value(Env& env, Advisor& advisor, StateId state, int horizon,
                                  double beta, Rng& rng) {
  const int n = env.agent_count();
  std::vector<double> value(n, 0.0);
  double discount = 1.0;
  env.set_state(state);
  JointAction a(n, 0);
  for (int t = 0; t < horizon && !env.state_is_terminal(env.state()); ++t) {
    AdvisorSolution solution = advisor.solve(env, env.state());
    for (int j = 0; j < n; ++j) a[j] = rng.sample(solution.strategy(j));
    EnvStep stepped = env.step(a);
    for (int j = 0; j < n; ++j) value[j] += discount * stepped.rewards[j];
    discount *= beta;
  }
  return value;
}

}  // namespace

std::vector<JointQTable> advisor_value_q(const Env& env, Advisor& advisor,
                                         const OracleConfig& config, Rng& rng) {
  config.validate();
  const int n = env.agent_count();
  const ActionSpace& space = env.action_space();
  const int states = env.state_count();
  const int horizon = config.horizon > 0 ? config.horizon : env.step_cap();
  if (states <= 0) throw ConfigError("advisor value oracle needs an enumerable environment");

  std::vector<JointQTable> tables;
  tables.reserve(n);
  for (int j = 0; j < n; ++j) tables.emplace_back(j, states, space);

  std::unique_ptr<Env> sim = env.clone();
  for (StateId s = 0; s < states; ++s) {
    if (sim->state_is_terminal(s)) continue;  // no action is taken from terminal states
    for (int flat = 0; flat < space.joint_count(); ++flat) {
      JointAction a = joint_unindex(flat, space);
      sim->set_state(s);
      EnvStep first = sim->step(a);

      std::vector<double> future(n, 0.0);
      bool exact = false;
      try {
        long budget = config.enumeration_budget;
        future = enumerate_value(*sim, advisor, first.next_state, horizon - 1, config.beta,
                                 budget);
        exact = true;
      } catch (const EnumerationBudgetExceeded&) {
      }
      if (!exact) {
        std::vector<double> acc(n, 0.0);
        for (int r = 0; r < config.rollouts; ++r) {
          std::vector<double> v =
              rollout_value(*sim, advisor, first.next_state, horizon - 1, config.beta, rng);
          for (int j = 0; j < n; ++j) acc[j] += v[j];
        }
        for (int j = 0; j < n; ++j) future[j] = acc[j] / config.rollouts;
      }
      for (int j = 0; j < n; ++j)
        tables[j].set(s, flat, first.rewards[j] + config.beta * future[j]);
    }
  }
  return tables;
}

std::vector<double> advisor_policy_value(const Env& env, Advisor& advisor,
                                         const OracleConfig& config, StateId state, Rng& rng) {
  config.validate();
  const int n = env.agent_count();
  const int horizon = config.horizon > 0 ? config.horizon : env.step_cap();
  std::unique_ptr<Env> sim = env.clone();
  try {
    long budget = config.enumeration_budget;
    return enumerate_value(*sim, advisor, state, horizon, config.beta, budget);
  } catch (const EnumerationBudgetExceeded&) {
  }
  std::vector<double> acc(n, 0.0);
  for (int r = 0; r < config.rollouts; ++r) {
    std::vector<double> v = rollout_value(*sim, advisor, state, horizon, config.beta, rng);
    for (int j = 0; j < n; ++j) acc[j] += v[j];
  }
  for (double& x : acc) x /= config.rollouts;
  return acc;
}

JointQTable nash_q_identical_interest(const Env& env, double beta, double tolerance) {
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
  if (tolerance <= 0.0) throw ConfigError("tolerance must be positive");
  const int n = env.agent_count();
  const ActionSpace& space = env.action_space();
  const int states = env.state_count();
  const int joint = space.joint_count();
  if (states <= 0) throw ConfigError("joint value iteration needs an enumerable environment");

  // tabulate the (deterministic) transitions once, checking equal rewards
  std::unique_ptr<Env> sim = env.clone();
  std::vector<double> reward(static_cast<std::size_t>(states) * joint, 0.0);
  std::vector<StateId> successor(static_cast<std::size_t>(states) * joint, 0);
  std::vector<bool> into_terminal(static_cast<std::size_t>(states) * joint, false);
  for (StateId s = 0; s < states; ++s) {
    if (sim->state_is_terminal(s)) continue;
    for (int flat = 0; flat < joint; ++flat) {
      sim->set_state(s);
      EnvStep stepped = sim->step(joint_unindex(flat, space));
      for (int j = 1; j < n; ++j) {
        if (stepped.rewards[j] != stepped.rewards[0])
          throw ConfigError("nash oracle requires an identical-interest game");
      }
      std::size_t idx = static_cast<std::size_t>(s) * joint + flat;
      reward[idx] = stepped.rewards[0];
      successor[idx] = stepped.next_state;
      into_terminal[idx] = sim->state_is_terminal(stepped.next_state);
    }
  }

  JointQTable q(0, states, space);
  std::vector<double> state_max(states, 0.0);
  double change = tolerance + 1.0;
  while (change >= tolerance) {
    for (StateId s = 0; s < states; ++s) {
      double m = -std::numeric_limits<double>::infinity();
      auto slice = q.slice(s);
      for (int flat = 0; flat < joint; ++flat) m = std::max(m, slice[flat]);
      state_max[s] = m;
    }
    change = 0.0;
    for (StateId s = 0; s < states; ++s) {
      if (env.state_is_terminal(s)) continue;
      auto slice = q.slice(s);
      for (int flat = 0; flat < joint; ++flat) {
        std::size_t idx = static_cast<std::size_t>(s) * joint + flat;
        double target = reward[idx];
        if (!into_terminal[idx]) target += beta * state_max[successor[idx]];
        change = std::max(change, std::abs(target - slice[flat]));
        slice[flat] = target;
      }
    }
  }
  return q;
}

double mse(const JointQTable& a, const JointQTable& b) {
  if (!a.same_shape(b)) throw ConfigError("mse requires tables of identical shape");
  const auto& x = a.raw();
  const auto& y = b.raw();
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    acc += d * d;
  }
  return acc / static_cast<double>(x.size());
}

double bellman_residual(const Env& env, const JointQTable& q, double beta) {
  const ActionSpace& space = env.action_space();
  const int joint = space.joint_count();
  std::unique_ptr<Env> sim = env.clone();
  double worst = 0.0;
  for (StateId s = 0; s < env.state_count(); ++s) {
    if (sim->state_is_terminal(s)) continue;
    for (int flat = 0; flat < joint; ++flat) {
      sim->set_state(s);
      EnvStep stepped = sim->step(joint_unindex(flat, space));
      double target = stepped.rewards[0];
      if (!sim->state_is_terminal(stepped.next_state)) {
        auto slice = q.slice(stepped.next_state);
        double m = -std::numeric_limits<double>::infinity();
        for (int f = 0; f < joint; ++f) m = std::max(m, slice[f]);
        target += beta * m;
      }
      worst = std::max(worst, std::abs(q.at(s, flat) - target));
    }
  }
  return worst;
}

}  // namespace admiral
