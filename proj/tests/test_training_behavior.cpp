// Longer-horizon behavioural checks on the training loops: advisor-free
// learning beats random play, the adaptive advisor's evaluation curve
// crosses the static random one, and the actor-critic variant's execution
// quality depends on the actor signal.

#include <doctest.h>

#include "admiral/advisors.hpp"
#include "admiral/neural.hpp"
#include "admiral/oracle.hpp"
#include "admiral/tabular.hpp"

using namespace admiral;

namespace {

double random_policy_return(const GridMazeEnv& env, int rollouts, std::uint64_t seed) {
  RandomAdvisor uniform_policy;
  OracleConfig config;
  config.beta = 0.999999;  // effectively the undiscounted episode return
  config.rollouts = rollouts;
  config.enumeration_budget = 0;
  Rng rng(seed);
  StateId start = env.joint_id(env.config().start_cells);
  return advisor_policy_value(env, uniform_policy, config, start, rng)[0];
}

}  // namespace

TEST_CASE("advisor-free decision-making ends above the random-policy return") {
  GridMazeEnv env;
  double random_return = random_policy_return(env, 20000, 7);

  DmConfig config;
  config.alpha = 0.3;
  config.beta = 0.9;
  config.epsilon = Schedule{0.3, 0.05, 600};

  double final_mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    GridMazeEnv run_env;
    Rng rng = derive_rng(seed, "train");
    TrainResult r = train_dm(run_env, {}, config, 800, rng);
    for (long e = 700; e < 800; ++e) final_mean += r.episodes[e].rewards[0] / 300.0;
  }
  CHECK(final_mean > random_return + 0.5);  // clearly above, not marginally
}

TEST_CASE("adaptive advisor evaluation overtakes the static random advisor") {
  const long episodes = 1500;
  const long switch_episode = 500;
  std::vector<double> adaptive_curve(episodes, 0.0), random_curve(episodes, 0.0);

  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (int which = 0; which < 2; ++which) {
      GridMazeEnv env;
      std::unique_ptr<Advisor> advisor;
      if (which == 0)
        advisor = std::make_unique<ScriptedAdaptiveAdvisor>(env, switch_episode);
      else
        advisor = std::make_unique<MazeAdvisor>(env, 4);
      AeConfig config;
      Rng rng = derive_rng(seed, "train");
      TrainResult r = train_ae(env, *advisor, config, episodes, rng);
      double acc = 0.0;
      for (long e = 0; e < episodes; ++e) {
        acc += r.episodes[e].rewards[0];
        (which == 0 ? adaptive_curve : random_curve)[e] += acc / 3.0;
      }
    }
  }
  // identical in distribution before the switch, clearly ahead afterwards
  CHECK(adaptive_curve[episodes - 1] > random_curve[episodes - 1]);
  long cross = -1;
  for (long e = switch_episode; e < episodes; ++e) {
    if (adaptive_curve[e] > random_curve[e]) {
      cross = e;
      break;
    }
  }
  CHECK(cross >= switch_episode);
  CHECK(cross >= 0);
}

TEST_CASE("grade-4 advisor evaluates to exactly zero advisor influence") {
  // a grade-4 run is byte-identical to the random-advisor baseline run, so
  // the normalized value collapses to 0 exactly
  AeConfig config;
  GridMazeEnv env;
  double cr = 0, rcr = 0;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    {
      GridMazeEnv e2;
      MazeAdvisor grade4(e2, 4);
      Rng rng = derive_rng(seed, "train");
      TrainResult r = train_ae(e2, grade4, config, 300, rng);
      for (auto& rec : r.episodes) cr += rec.rewards[0];
    }
    {
      GridMazeEnv e2;
      RandomAdvisor random;
      Rng rng = derive_rng(seed, "train");
      TrainResult r = train_ae(e2, random, config, 300, rng);
      for (auto& rec : r.episodes) rcr += rec.rewards[0];
    }
  }
  CHECK(cr == rcr);
  CHECK(normalize_epsilon0(cr, rcr, 0.95 * 2.0 * 300 * 2) == 0.0);
}

TEST_CASE("deep evaluation separates the informed advisor from the random one") {
  auto cumulative = [&](int grade, std::uint64_t seed) {
    GridMazeEnv env;
    MazeAdvisor advisor(env, grade);
    AeNnConfig config;
    config.hidden = {32, 32};
    Rng rng = derive_rng(seed, "train");
    NnTrainResult r = train_ae_nn(env, advisor, config, 200, rng);
    double total = 0.0;
    for (const auto& e : r.episodes) total += e.rewards[0];
    return total;
  };
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    CHECK(cumulative(1, seed) > cumulative(4, seed));
}

TEST_CASE("actor-critic execution beats random play with the advantage signal") {
  GridMazeEnv env0;
  double random_return = random_policy_return(env0, 20000, 7);

  auto run = [&](bool advantage, std::uint64_t seed) {
    GridMazeEnv env;
    std::vector<std::unique_ptr<Advisor>> owned;
    owned.push_back(std::make_unique<MazeAdvisor>(env, 1));
    owned.push_back(std::make_unique<MazeAdvisor>(env, 1));
    std::vector<Advisor*> advisors{owned[0].get(), owned[1].get()};
    AcConfig config;
    config.advantage_signal = advantage;
    config.actor_learning_rate = 0.01;
    config.epsilon_prime = Schedule{0.8, 0.0, 1500};
    Rng rng = derive_rng(seed, "train");
    AcTrainResult r = train_dm_ac(env, advisors, config, 2000, rng);
    GridMazeEnv eval_env;
    Rng eval_rng = derive_rng(seed, "exec");
    return evaluate_actors(eval_env, r.agents, config, 300, eval_rng)[0];
  };

  double advantage_mean = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    double ret = run(true, seed);
    CHECK(ret > random_return);
    advantage_mean += ret / 3.0;
  }
  // the raw critic-loss weighting reinforces surprising actions and does not
  // reach the same execution quality on this maze
  double raw = run(false, 1);
  CHECK(advantage_mean > raw);
}
