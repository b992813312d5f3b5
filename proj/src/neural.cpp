#include "admiral/neural.hpp"

#include <algorithm>
#include <cmath>

namespace admiral {

namespace {

void check_common(const std::vector<int>& hidden, double beta, double lr, int batch,
                  std::size_t capacity, int sync) {
  if (hidden.empty()) throw ConfigError("need at least one hidden layer");
  for (int h : hidden)
    if (h <= 0) throw ConfigError("hidden sizes must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
  if (lr < 0.0) throw ConfigError("learning rate must be nonnegative");
  if (batch <= 0) throw ConfigError("batch size must be positive");
  if (capacity == 0) throw ConfigError("buffer capacity must be positive");
  if (sync <= 0) throw ConfigError("target sync period must be positive");
}

std::vector<int> q_net_sizes(const Env& env, const std::vector<int>& hidden) {
  std::vector<int> sizes;
  sizes.push_back(env.state_count());
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(env.action_space().joint_count());
  return sizes;
}

void one_hot(std::vector<double>& buf, int index) {
  std::fill(buf.begin(), buf.end(), 0.0);
  buf.at(index) = 1.0;
}

// greedy own action from per-joint-action net outputs, the other agents'
// slots held at `others`
int net_greedy_own(std::span<const double> q_out, const ActionSpace& space,
                   const JointAction& others, int agent) {
  JointAction probe = others;
  int best_a = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < space.size(agent); ++a) {
    probe[agent] = a;
    double v = q_out[joint_index(probe, space)];
    if (v > best) {
      best = v;
      best_a = a;
    }
  }
  return best_a;
}

void guard_divergence(double q, double bound) {
  if (std::abs(q) > bound) throw Error("network training diverged: |Q| exceeded guard");
}

// One minibatch TD step for agent `j`. `target_value` computes the bootstrap
// term for a sampled transition from the target net's outputs at s'.
template <typename TargetFn>
void td_minibatch(Mlp& eval, Mlp& target, const ReplayBuffer& buffer, int batch, int agent,
                  double beta, double lr, double guard, std::vector<double>& sbuf,
                  std::vector<double>& gbuf, Rng& rng, TargetFn&& target_value) {
  const int out_dim = eval.output_size();
  eval.zero_grads();
  for (int b = 0; b < batch; ++b) {
    const Transition& t = buffer.sample(rng);
    double y = t.rewards[agent];
    if (!t.into_terminal) {
      one_hot(sbuf, t.s_next);
      y += beta * target_value(target.forward(sbuf), t);
    }
    one_hot(sbuf, t.s);
    auto q = eval.forward(sbuf);
    double pred = q[t.a];
    guard_divergence(pred, guard);
    std::fill(gbuf.begin(), gbuf.begin() + out_dim, 0.0);
    gbuf[t.a] = 2.0 * (pred - y) / batch;
    eval.backward(std::span<const double>(gbuf.data(), out_dim));
  }
  eval.sgd_step(lr);
}

}  // namespace

void DmNnConfig::validate() const {
  check_common(hidden, beta, learning_rate, batch_size, buffer_capacity, target_sync_period);
}

void AeNnConfig::validate() const {
  check_common(hidden, beta, learning_rate, batch_size, buffer_capacity, target_sync_period);
  if (eta < 0.0 || eta_prime < 0.0 || eta + eta_prime > 1.0)
    throw ConfigError("need eta, eta' >= 0 and eta + eta' <= 1");
}

void AcConfig::validate() const {
  if (hidden.empty()) throw ConfigError("need at least one hidden layer");
  if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("beta must be in [0,1)");
  if (critic_learning_rate < 0.0 || actor_learning_rate < 0.0)
    throw ConfigError("learning rates must be nonnegative");
  if (probability_floor <= 0.0) throw ConfigError("probability floor must be positive");
}

NnTrainResult train_dm_nn(Env& env, const std::vector<Advisor*>& advisors,
                          const DmNnConfig& config, long episodes, Rng& rng,
                          const NnHooks& hooks) {
  config.validate();
  const int n = env.agent_count();
  if (!advisors.empty() && static_cast<int>(advisors.size()) != n)
    throw ConfigError("need one advisor per agent (or none at all)");
  const ActionSpace& space = env.action_space();

  NnTrainResult result;
  auto sizes = q_net_sizes(env, config.hidden);
  for (int j = 0; j < n; ++j) {
    Mlp net(sizes);
    net.init_random(rng);
    result.eval_nets.push_back(net);
    result.target_nets.push_back(net);  // target starts as a copy of eval
  }

  ReplayBuffer buffer(config.buffer_capacity);
  std::vector<double> sbuf(env.state_count(), 0.0);
  std::vector<double> gbuf(space.joint_count(), 0.0);
  auto advisor_of = [&](int j) -> Advisor* { return advisors.empty() ? nullptr : advisors[j]; };

  auto select = [&](int j, StateId at, const JointAction& others, double eps, double eps_p) {
    double u = rng.uniform();
    if (u < eps_p) {
      Advisor* adv = advisor_of(j);
      if (adv == nullptr) throw ConfigError("advisor probability is positive without an advisor");
      return adv->recommend(env, at, j, rng);
    }
    if (u < eps_p + eps) return rng.uniform_int(space.size(j));
    one_hot(sbuf, at);
    return net_greedy_own(result.eval_nets[j].forward(sbuf), space, others, j);
  };

  StateId s = env.reset(rng);
  long episode = 0;
  double eps = config.epsilon.value(0);
  double eps_prime = config.epsilon_prime.value(0);
  if (eps + eps_prime > 1.0) throw ConfigError("epsilon + epsilon' exceeds 1");

  JointAction current(n, 0);
  JointAction zeros(n, 0);
  for (int j = 0; j < n; ++j) current[j] = select(j, s, zeros, eps, eps_prime);

  std::vector<double> episode_rewards(n, 0.0);
  long steps_this_episode = 0;
  long update_counter = 0;
  int since_sync = 0;
  JointAction next(n, 0);

  while (episode < episodes) {
    EnvStep stepped = env.step(current);
    ++result.total_steps;
    ++steps_this_episode;
    for (int j = 0; j < n; ++j) episode_rewards[j] += stepped.rewards[j];
    const StateId s_next = stepped.next_state;
    const bool absorbing = env.state_is_terminal(s_next);

    // the observed current actions stand in for the other agents' next moves
    for (int j = 0; j < n; ++j) next[j] = select(j, s_next, current, eps, eps_prime);

    Transition t;
    t.s = s;
    t.a = joint_index(current, space);
    t.rewards = stepped.rewards;
    t.s_next = s_next;
    t.a_next = joint_index(next, space);
    t.into_terminal = absorbing;
    buffer.push(std::move(t));

    current = next;
    s = s_next;

    if (stepped.terminal) {
      long rounds = config.updates_per_episode >= 0 ? config.updates_per_episode
                                                    : steps_this_episode;
      for (long r = 0; r < rounds; ++r) {
        if (buffer.size() < static_cast<std::size_t>(config.batch_size)) break;
        for (int j = 0; j < n; ++j) {
          td_minibatch(result.eval_nets[j], result.target_nets[j], buffer, config.batch_size, j,
                       config.beta, config.learning_rate, config.divergence_guard, sbuf, gbuf,
                       rng, [&](std::span<const double> q_next, const Transition& tr) {
                         return q_next[tr.a_next];
                       });
        }
        ++update_counter;
        if (++since_sync >= config.target_sync_period) {
          since_sync = 0;
          for (int j = 0; j < n; ++j)
            result.target_nets[j].params() = result.eval_nets[j].params();
        }
        if (hooks.update_probe)
          hooks.update_probe(update_counter, result.eval_nets, result.target_nets);
      }

      EpisodeRecord rec;
      rec.episode = episode;
      rec.rewards = episode_rewards;
      rec.epsilon = eps;
      rec.epsilon_prime = eps_prime;
      result.episodes.push_back(std::move(rec));
      for (Advisor* a : advisors)
        if (a != nullptr) a->on_episode_end();

      ++episode;
      if (episode >= episodes) break;
      eps = config.epsilon.value(episode);
      eps_prime = config.epsilon_prime.value(episode);
      std::fill(episode_rewards.begin(), episode_rewards.end(), 0.0);
      steps_this_episode = 0;
      s = env.reset(rng);
      for (int j = 0; j < n; ++j) current[j] = select(j, s, zeros, eps, eps_prime);
    }
  }
  return result;
}

NnTrainResult train_ae_nn(Env& env, Advisor& advisor, const AeNnConfig& config, long episodes,
                          Rng& rng, const NnHooks& hooks) {
  config.validate();
  const int n = env.agent_count();
  const ActionSpace& space = env.action_space();

  NnTrainResult result;
  auto sizes = q_net_sizes(env, config.hidden);
  for (int j = 0; j < n; ++j) {
    Mlp net(sizes);
    net.init_random(rng);
    result.eval_nets.push_back(net);
    result.target_nets.push_back(net);
  }

  ReplayBuffer buffer(config.buffer_capacity);
  std::vector<double> sbuf(env.state_count(), 0.0);
  std::vector<double> gbuf(space.joint_count(), 0.0);

  StateId s = env.reset(rng);
  JointAction previous(n, 0);
  JointAction current(n, 0);
  JointAction advised(n, 0);
  std::vector<double> episode_rewards(n, 0.0);
  long steps_this_episode = 0;
  long update_counter = 0;
  int since_sync = 0;
  long episode = 0;

  while (episode < episodes) {
    for (int j = 0; j < n; ++j) {
      double u = rng.uniform();
      if (u < config.eta_prime) {
        current[j] = advisor.recommend(env, s, j, rng);
      } else if (u < config.eta_prime + config.eta) {
        current[j] = rng.uniform_int(space.size(j));
      } else {
        one_hot(sbuf, s);
        current[j] = net_greedy_own(result.eval_nets[j].forward(sbuf), space, previous, j);
      }
    }

    EnvStep stepped = env.step(current);
    ++result.total_steps;
    ++steps_this_episode;
    for (int j = 0; j < n; ++j) episode_rewards[j] += stepped.rewards[j];
    const StateId s_next = stepped.next_state;
    const bool absorbing = env.state_is_terminal(s_next);

    for (int j = 0; j < n; ++j) advised[j] = advisor.recommend(env, s_next, j, rng);

    Transition t;
    t.s = s;
    t.a = joint_index(current, space);
    t.rewards = stepped.rewards;
    t.s_next = s_next;
    t.a_next = joint_index(advised, space);
    t.into_terminal = absorbing;
    buffer.push(std::move(t));

    previous = current;
    s = s_next;

    if (stepped.terminal) {
      long rounds = config.updates_per_episode >= 0 ? config.updates_per_episode
                                                    : steps_this_episode;
      for (long r = 0; r < rounds; ++r) {
        if (buffer.size() < static_cast<std::size_t>(config.batch_size)) break;
        for (int j = 0; j < n; ++j) {
          td_minibatch(result.eval_nets[j], result.target_nets[j], buffer, config.batch_size, j,
                       config.beta, config.learning_rate, config.divergence_guard, sbuf, gbuf,
                       rng, [&](std::span<const double> q_next, const Transition& tr) {
                         return advisor_q(advisor.solve(env, tr.s_next), q_next, space);
                       });
        }
        ++update_counter;
        if (++since_sync >= config.target_sync_period) {
          since_sync = 0;
          for (int j = 0; j < n; ++j)
            result.target_nets[j].params() = result.eval_nets[j].params();
        }
        if (hooks.update_probe)
          hooks.update_probe(update_counter, result.eval_nets, result.target_nets);
      }

      EpisodeRecord rec;
      rec.episode = episode;
      rec.rewards = episode_rewards;
      rec.epsilon = config.eta;
      rec.epsilon_prime = config.eta_prime;
      result.episodes.push_back(std::move(rec));
      advisor.on_episode_end();

      ++episode;
      if (episode >= episodes) break;
      std::fill(episode_rewards.begin(), episode_rewards.end(), 0.0);
      steps_this_episode = 0;
      s = env.reset(rng);
      std::fill(previous.begin(), previous.end(), 0);
    }
  }
  return result;
}

std::vector<double> actor_policy(Mlp& actor, std::span<const double> obs, double floor) {
  auto logits = actor.forward(obs);
  double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(logits[i] - m);
    sum += p[i];
  }
  for (double& x : p) x = std::max(x / sum, floor);
  double renorm = 0.0;
  for (double x : p) renorm += x;
  for (double& x : p) x /= renorm;
  return p;
}

void actor_reinforce_update(Mlp& actor, std::span<const double> obs, int action, double signal,
                            double learning_rate, double floor) {
  std::vector<double> probs = actor_policy(actor, obs, floor);
  std::vector<double> grad(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k) {
    double indicator = static_cast<int>(k) == action ? 1.0 : 0.0;
    grad[k] = -signal * (indicator - probs[k]);
  }
  actor.zero_grads();
  actor.backward(grad);
  actor.sgd_step(learning_rate);
}

namespace {

// critic input: one-hot joint state followed by one-hot blocks for every
// other agent's action
void fill_critic_input(std::vector<double>& buf, int state_count, StateId s,
                       const ActionSpace& space, const JointAction& joint, int agent) {
  std::fill(buf.begin(), buf.end(), 0.0);
  buf.at(s) = 1.0;
  int offset = state_count;
  for (int k = 0; k < space.agent_count(); ++k) {
    if (k == agent) continue;
    buf.at(offset + joint[k]) = 1.0;
    offset += space.size(k);
  }
}

}  // namespace

AcTrainResult train_dm_ac(Env& env, const std::vector<Advisor*>& advisors, const AcConfig& config,
                          long episodes, Rng& rng) {
  config.validate();
  const int n = env.agent_count();
  if (!advisors.empty() && static_cast<int>(advisors.size()) != n)
    throw ConfigError("need one advisor per agent (or none at all)");
  const ActionSpace& space = env.action_space();
  const int state_count = env.state_count();
  const int obs_count = config.actor_local_obs ? env.local_observation_count() : state_count;

  AcTrainResult result;
  for (int j = 0; j < n; ++j) {
    int others_dims = 0;
    for (int k = 0; k < n; ++k)
      if (k != j) others_dims += space.size(k);
    std::vector<int> critic_sizes{state_count + others_dims};
    critic_sizes.insert(critic_sizes.end(), config.hidden.begin(), config.hidden.end());
    critic_sizes.push_back(space.size(j));
    std::vector<int> actor_sizes{obs_count};
    actor_sizes.insert(actor_sizes.end(), config.hidden.begin(), config.hidden.end());
    actor_sizes.push_back(space.size(j));
    AcPair pair{Mlp(critic_sizes), Mlp(actor_sizes)};
    pair.critic.init_random(rng);
    pair.actor.init_random(rng);
    result.agents.push_back(std::move(pair));
  }

  std::vector<double> cbuf;
  std::vector<double> obuf(obs_count, 0.0);
  auto advisor_of = [&](int j) -> Advisor* { return advisors.empty() ? nullptr : advisors[j]; };
  auto observe = [&](int j) { return config.actor_local_obs ? env.observe(j) : env.state(); };

  StateId s = env.reset(rng);
  long episode = 0;
  double eps_prime = config.epsilon_prime.value(0);

  std::vector<int> obs(n, 0);
  JointAction current(n, 0);
  for (int j = 0; j < n; ++j) {
    obs[j] = observe(j);
    one_hot(obuf, obs[j]);
    current[j] = rng.sample(actor_policy(result.agents[j].actor, obuf, config.probability_floor));
  }

  std::vector<double> episode_rewards(n, 0.0);
  JointAction next(n, 0);

  while (episode < episodes) {
    EnvStep stepped = env.step(current);
    ++result.total_steps;
    for (int j = 0; j < n; ++j) episode_rewards[j] += stepped.rewards[j];
    const StateId s_next = stepped.next_state;
    const bool absorbing = env.state_is_terminal(s_next);

    std::vector<int> obs_next(n, 0);
    for (int j = 0; j < n; ++j) {
      obs_next[j] = observe(j);
      double u = rng.uniform();
      Advisor* adv = advisor_of(j);
      if (u < eps_prime) {
        if (adv == nullptr) throw ConfigError("advisor probability is positive without an advisor");
        next[j] = adv->recommend(env, s_next, j, rng);
      } else {
        one_hot(obuf, obs_next[j]);
        next[j] =
            rng.sample(actor_policy(result.agents[j].actor, obuf, config.probability_floor));
      }
    }

    for (int j = 0; j < n; ++j) {
      Mlp& critic = result.agents[j].critic;
      cbuf.assign(critic.input_size(), 0.0);

      double y = stepped.rewards[j];
      if (!absorbing) {
        fill_critic_input(cbuf, state_count, s_next, space, next, j);
        y += config.beta * critic.forward(cbuf)[next[j]];
      }
      fill_critic_input(cbuf, state_count, s, space, current, j);
      auto v = critic.forward(cbuf);
      double v_pred = v[current[j]];
      double td = v_pred - y;
      double critic_loss = td * td;

      std::vector<double> cgrad(critic.output_size(), 0.0);
      cgrad[current[j]] = 2.0 * td;
      critic.zero_grads();
      critic.backward(cgrad);
      critic.sgd_step(config.critic_learning_rate);

      // reinforce the taken action, scaled by the critic's loss (or by the
      // signed TD error in the advantage variant)
      double signal = config.advantage_signal ? (y - v_pred) : critic_loss;
      one_hot(obuf, obs[j]);
      actor_reinforce_update(result.agents[j].actor, obuf, current[j], signal,
                             config.actor_learning_rate, config.probability_floor);
    }

    current = next;
    obs = obs_next;
    s = s_next;

    if (stepped.terminal) {
      EpisodeRecord rec;
      rec.episode = episode;
      rec.rewards = episode_rewards;
      rec.epsilon = 0.0;
      rec.epsilon_prime = eps_prime;
      result.episodes.push_back(std::move(rec));
      for (Advisor* a : advisors)
        if (a != nullptr) a->on_episode_end();

      ++episode;
      if (episode >= episodes) break;
      eps_prime = config.epsilon_prime.value(episode);
      std::fill(episode_rewards.begin(), episode_rewards.end(), 0.0);
      s = env.reset(rng);
      for (int j = 0; j < n; ++j) {
        obs[j] = observe(j);
        one_hot(obuf, obs[j]);
        current[j] =
            rng.sample(actor_policy(result.agents[j].actor, obuf, config.probability_floor));
      }
    }
  }
  return result;
}

std::vector<double> evaluate_actors(Env& env, std::vector<AcPair>& agents, const AcConfig& config,
                                    long episodes, Rng& rng) {
  const int n = env.agent_count();
  if (static_cast<int>(agents.size()) != n) throw ConfigError("need one actor pair per agent");
  const int obs_count = config.actor_local_obs ? env.local_observation_count() : env.state_count();
  std::vector<double> obuf(obs_count, 0.0);
  std::vector<double> totals(n, 0.0);

  for (long e = 0; e < episodes; ++e) {
    env.reset(rng);
    JointAction a(n, 0);
    while (!env.done()) {
      for (int j = 0; j < n; ++j) {
        int o = config.actor_local_obs ? env.observe(j) : env.state();
        one_hot(obuf, o);
        a[j] = rng.sample(actor_policy(agents[j].actor, obuf, config.probability_floor));
      }
      EnvStep stepped = env.step(a);
      for (int j = 0; j < n; ++j) totals[j] += stepped.rewards[j];
    }
  }
  for (double& t : totals) t /= static_cast<double>(episodes);
  return totals;
}

}  // namespace admiral
