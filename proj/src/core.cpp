#include <algorithm>
#include <cmath>

#include "admiral/qtable.hpp"
#include "admiral/rng.hpp"
#include "admiral/types.hpp"

namespace admiral {

int joint_index(const JointAction& actions, const ActionSpace& space) {
  if (static_cast<int>(actions.size()) != space.agent_count())
    throw ConfigError("joint action length does not match agent count");
  int flat = 0;
  for (int j = 0; j < space.agent_count(); ++j) {
    int a = actions[j];
    if (a < 0 || a >= space.size(j)) throw ConfigError("action index out of range");
    flat = flat * space.size(j) + a;
  }
  return flat;
}

JointAction joint_unindex(int flat, const ActionSpace& space) {
  if (flat < 0 || flat >= space.joint_count()) throw ConfigError("flat joint index out of range");
  JointAction actions(space.agent_count());
  for (int j = space.agent_count() - 1; j >= 0; --j) {
    actions[j] = flat % space.size(j);
    flat /= space.size(j);
  }
  return actions;
}

void AdvisorSolution::validate(const ActionSpace& space) const {
  if (agent_count() != space.agent_count())
    throw ConfigError("advisor solution agent count mismatch");
  for (int j = 0; j < agent_count(); ++j) {
    const auto& p = per_agent_[j];
    if (static_cast<int>(p.size()) != space.size(j))
      throw ConfigError("advisor strategy length mismatch");
    double sum = 0.0;
    for (double x : p) {
      if (!(x >= 0.0)) throw ConfigError("advisor strategy has negative entry");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("advisor strategy does not sum to 1");
  }
}

AdvisorSolution AdvisorSolution::deterministic(const JointAction& actions,
                                               const ActionSpace& space) {
  std::vector<std::vector<double>> per_agent(space.agent_count());
  for (int j = 0; j < space.agent_count(); ++j) {
    per_agent[j].assign(space.size(j), 0.0);
    per_agent[j].at(actions.at(j)) = 1.0;
  }
  return AdvisorSolution(std::move(per_agent));
}

AdvisorSolution AdvisorSolution::uniform(const ActionSpace& space) {
  std::vector<std::vector<double>> per_agent(space.agent_count());
  for (int j = 0; j < space.agent_count(); ++j)
    per_agent[j].assign(space.size(j), 1.0 / space.size(j));
  return AdvisorSolution(std::move(per_agent));
}

double advisor_q(const AdvisorSolution& solution, std::span<const double> q_slice,
                 const ActionSpace& space) {
  solution.validate(space);
  if (static_cast<int>(q_slice.size()) != space.joint_count())
    throw ConfigError("q slice length does not match joint action count");

  const int n = space.agent_count();
  JointAction a(n, 0);
  double total = 0.0;
  for (int flat = 0; flat < space.joint_count(); ++flat) {
    double w = 1.0;
    for (int j = 0; j < n; ++j) w *= solution.strategy(j)[a[j]];
    if (w != 0.0) total += w * q_slice[flat];
    // advance row-major odometer (last agent fastest)
    for (int j = n - 1; j >= 0; --j) {
      if (++a[j] < space.size(j)) break;
      a[j] = 0;
    }
  }
  if (!std::isfinite(total)) throw ConfigError("advisor_q produced a non-finite value");
  return total;
}

int greedy_own_action(const JointQTable& table, StateId state, const JointAction& others,
                      int agent, Rng& rng) {
  const ActionSpace& space = table.space();
  if (agent < 0 || agent >= space.agent_count()) throw ConfigError("agent index out of range");
  JointAction probe = others;
  if (static_cast<int>(probe.size()) != space.agent_count())
    throw ConfigError("joint action length does not match agent count");

  double best = -std::numeric_limits<double>::infinity();
  int tie_count = 0;
  int chosen = 0;
  for (int a = 0; a < space.size(agent); ++a) {
    probe[agent] = a;
    double v = table.at(state, probe);
    if (v > best) {
      best = v;
      tie_count = 1;
      chosen = a;
    } else if (v == best) {
      // reservoir sampling keeps each tied argmax equally likely
      ++tie_count;
      if (rng.uniform_int(tie_count) == 0) chosen = a;
    }
  }
  return chosen;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  // FNV-1a over the tag, then two splitmix64 finalization rounds.
  std::uint64_t h = 1469598103934665603ull;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (h ^ (index + 1));
  for (int round = 0; round < 2; ++round) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
  }
  return z;
}

}  // namespace admiral
