#include "admiral/tabular.hpp"

#include <algorithm>
#include <cmath>

namespace admiral {

double dm_update(JointQTable& q, StateId s, const JointAction& a, double reward, StateId s_next,
                 const JointAction& a_next, double alpha, double beta, bool bootstrap) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in [0,1)");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
  if (!std::isfinite(reward)) throw ConfigError("non-finite reward");
  double target = reward + (bootstrap ? beta * q.at(s_next, a_next) : 0.0);
  double updated = (1.0 - alpha) * q.at(s, a) + alpha * target;
  if (!std::isfinite(updated)) throw ConfigError("non-finite Q update");
  q.set(s, a, updated);
  return updated;
}

double ae_update(JointQTable& q, StateId s, const JointAction& a, double reward,
                 const AdvisorSolution& solution_next, StateId s_next, double alpha, double beta,
                 bool bootstrap) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in [0,1)");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
  if (!std::isfinite(reward)) throw ConfigError("non-finite reward");
  double target = reward;
  if (bootstrap) target += beta * advisor_q(solution_next, q.slice(s_next), q.space());
  double updated = (1.0 - alpha) * q.at(s, a) + alpha * target;
  if (!std::isfinite(updated)) throw ConfigError("non-finite Q update");
  q.set(s, a, updated);
  return updated;
}

int select_mixed_action(const JointQTable& q, const Env& env, StateId state,
                        const JointAction& others, int agent, Advisor* advisor, double p_advisor,
                        double p_random, Rng& rng) {
  if (p_advisor < 0.0 || p_random < 0.0 || p_advisor + p_random > 1.0)
    throw ConfigError("action mixture probabilities must be nonnegative and sum to at most 1");
  if (p_advisor > 0.0 && advisor == nullptr)
    throw ConfigError("advisor probability is positive but no advisor was given");
  double u = rng.uniform();
  if (u < p_advisor) return advisor->recommend(env, state, agent, rng);
  if (u < p_advisor + p_random) return rng.uniform_int(q.space().size(agent));
  return greedy_own_action(q, state, others, agent, rng);
}

double normalize_epsilon0(double cr, double rcr, double mcr) {
  if (!(mcr > rcr)) throw ConfigError("normalization needs mcr > rcr");
  double raw = std::clamp((cr - rcr) / (mcr - rcr), 0.0, 1.0);
  double snapped = std::round(raw * 10.0) / 10.0;
  double out = std::abs(raw - snapped) <= 0.005 ? snapped : std::ceil(raw * 10.0) / 10.0;
  return std::clamp(out, 0.0, 1.0);
}

namespace {

bool probe_wanted(const TrainHooks& hooks, long episode) {
  if (!hooks.mse_probe) return false;
  if (!hooks.mse_when) return true;
  return hooks.mse_when(episode);
}

}  // namespace

TrainResult train_dm(Env& env, const std::vector<Advisor*>& advisors, const DmConfig& config,
                     long episodes, Rng& rng, const TrainHooks& hooks) {
  config.validate();
  const int n = env.agent_count();
  if (!advisors.empty() && static_cast<int>(advisors.size()) != n)
    throw ConfigError("need one advisor per agent (or none at all)");
  const ActionSpace& space = env.action_space();

  // tables[j][k]: agent j's view of agent k's Q-table (k == j is its own)
  std::vector<std::vector<JointQTable>> tables(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) tables[j].emplace_back(k, env.state_count(), space);

  TrainResult result;
  result.episodes.reserve(episodes);

  StateId s = env.reset(rng);
  long episode = 0;
  double eps = config.epsilon.value(0);
  double eps_prime = config.epsilon_prime.value(0);

  auto advisor_of = [&](int j) -> Advisor* { return advisors.empty() ? nullptr : advisors[j]; };

  // initial action selection; no observed actions exist yet, so greedy
  // conditioning falls back to action 0 for the other agents
  JointAction current(n, 0);
  auto select_initial = [&]() {
    JointAction zeros(n, 0);
    for (int j = 0; j < n; ++j)
      current[j] = select_mixed_action(tables[j][j], env, s, zeros, j, advisor_of(j), eps_prime,
                                       eps, rng);
  };
  select_initial();

  std::vector<double> episode_rewards(n, 0.0);
  double episode_max_delta = 0.0;
  JointAction next(n, 0);
  JointAction predicted(n, 0);

  while (episode < episodes) {
    EnvStep stepped = env.step(current);
    ++result.total_steps;
    for (int j = 0; j < n; ++j) episode_rewards[j] += stepped.rewards[j];
    const StateId s_next = stepped.next_state;
    const bool absorbing = env.state_is_terminal(s_next);

    // each agent predicts every other agent's next greedy action from its
    // copies, conditioning on the actions just observed, then picks its own
    // next action (advisor / random / greedy against those predictions)
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (k == j) continue;
        predicted[k] = greedy_own_action(tables[j][k], s_next, current, k, rng);
      }
      next[j] = select_mixed_action(tables[j][j], env, s_next, predicted, j, advisor_of(j),
                                    eps_prime, eps, rng);
    }

    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double before = tables[j][k].at(s, current);
        double after = dm_update(tables[j][k], s, current, stepped.rewards[k], s_next, next,
                                 config.alpha, config.beta, !absorbing);
        episode_max_delta = std::max(episode_max_delta, std::abs(after - before));
      }
    }
    if (hooks.step_probe) hooks.step_probe(tables);

    current = next;
    s = s_next;

    if (stepped.terminal) {
      EpisodeRecord rec;
      rec.episode = episode;
      rec.rewards = episode_rewards;
      rec.epsilon = eps;
      rec.epsilon_prime = eps_prime;
      if (probe_wanted(hooks, episode)) {
        std::vector<JointQTable> own;
        own.reserve(n);
        for (int j = 0; j < n; ++j) own.push_back(tables[j][j]);
        rec.mse_to_oracle = hooks.mse_probe(own);
      }
      result.episodes.push_back(std::move(rec));

      for (Advisor* a : advisors) {
        if (a != nullptr) a->on_episode_end();
      }
      ++episode;
      if (hooks.early_stop && episode_max_delta < hooks.early_stop_tol) break;
      if (episode >= episodes) break;
      eps = config.epsilon.value(episode);
      eps_prime = config.epsilon_prime.value(episode);
      std::fill(episode_rewards.begin(), episode_rewards.end(), 0.0);
      episode_max_delta = 0.0;
      s = env.reset(rng);
      select_initial();
    }
  }

  result.tables.reserve(n);
  for (int j = 0; j < n; ++j) result.tables.push_back(std::move(tables[j][j]));
  return result;
}

TrainResult train_ae(Env& env, Advisor& advisor, const AeConfig& config, long episodes, Rng& rng,
                     const TrainHooks& hooks) {
  config.validate();
  const int n = env.agent_count();
  const ActionSpace& space = env.action_space();

  std::vector<JointQTable> tables;
  tables.reserve(n);
  for (int j = 0; j < n; ++j) tables.emplace_back(j, env.state_count(), space);

  TrainResult result;
  result.episodes.reserve(episodes);

  StateId s = env.reset(rng);
  JointAction previous(n, 0);  // no observed actions before the first step
  JointAction current(n, 0);
  std::vector<double> episode_rewards(n, 0.0);
  double episode_max_delta = 0.0;
  long episode = 0;

  while (episode < episodes) {
    for (int j = 0; j < n; ++j)
      current[j] = select_mixed_action(tables[j], env, s, previous, j, &advisor,
                                       config.eta_prime, config.eta, rng);

    EnvStep stepped = env.step(current);
    ++result.total_steps;
    for (int j = 0; j < n; ++j) episode_rewards[j] += stepped.rewards[j];
    const StateId s_next = stepped.next_state;
    const bool absorbing = env.state_is_terminal(s_next);

    AdvisorSolution solution = advisor.solve(env, s_next);
    for (int j = 0; j < n; ++j) {
      double before = tables[j].at(s, current);
      double after = ae_update(tables[j], s, current, stepped.rewards[j], solution, s_next,
                               config.alpha, config.beta, !absorbing);
      episode_max_delta = std::max(episode_max_delta, std::abs(after - before));
    }
    if (hooks.step_probe) hooks.step_probe({tables});

    previous = current;
    s = s_next;

    if (stepped.terminal) {
      EpisodeRecord rec;
      rec.episode = episode;
      rec.rewards = episode_rewards;
      rec.epsilon = config.eta;
      rec.epsilon_prime = config.eta_prime;
      if (probe_wanted(hooks, episode)) rec.mse_to_oracle = hooks.mse_probe(tables);
      result.episodes.push_back(std::move(rec));

      advisor.on_episode_end();
      ++episode;
      if (hooks.early_stop && episode_max_delta < hooks.early_stop_tol) break;
      if (episode >= episodes) break;
      std::fill(episode_rewards.begin(), episode_rewards.end(), 0.0);
      episode_max_delta = 0.0;
      s = env.reset(rng);
      std::fill(previous.begin(), previous.end(), 0);
    }
  }

  result.tables = std::move(tables);
  return result;
}

}  // namespace admiral
