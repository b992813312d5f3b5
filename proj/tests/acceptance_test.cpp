// Acceptance suite: one check per headline claim, one PASS/FAIL line each.
// Exits nonzero if any check fails. Heavier experiments print their measured
// numbers so reruns can be compared at a glance.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "admiral/advisors.hpp"
#include "admiral/harness.hpp"
#include "admiral/io.hpp"
#include "admiral/neural.hpp"
#include "admiral/oracle.hpp"
#include "admiral/tabular.hpp"
#include "test_support.hpp"

using namespace admiral;

namespace {

int g_failures = 0;

void report(int number, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", number, title,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

GridMazeConfig convergence_maze_ae() {
  GridMazeConfig mc;
  mc.start_cells = {0, 4};
  mc.goal_cell = 24;
  mc.pitfall_cells = {20};
  return mc;
}

GridMazeConfig convergence_maze_dm() {
  GridMazeConfig mc;
  mc.rows = mc.cols = 3;
  mc.start_cells = {0, 2};
  mc.goal_cell = 8;
  mc.pitfall_cells = {6};
  mc.reward_both_goal = 1.0;
  mc.reward_both_pitfall = -1.0;
  mc.reward_goal_and_pitfall = 1.0;
  return mc;
}

double ae_cumulative(const GridMazeConfig& mc, int grade, std::uint64_t seed, long episodes,
                     const AeConfig& config) {
  GridMazeEnv env(mc);
  std::unique_ptr<Advisor> advisor;
  if (grade == 0)
    advisor = std::make_unique<RandomAdvisor>();
  else
    advisor = std::make_unique<MazeAdvisor>(env, grade);
  Rng rng = derive_rng(seed, "train");
  TrainResult r = train_ae(env, *advisor, config, episodes, rng);
  double total = 0.0;
  for (const auto& e : r.episodes) total += e.rewards[0];
  return total;
}

TrainResult dm_run(const GridMazeConfig& mc, int grade, const DmConfig& config,
                   std::uint64_t seed, long episodes, const TrainHooks& hooks = {}) {
  GridMazeEnv env(mc);
  std::vector<std::unique_ptr<Advisor>> owned;
  std::vector<Advisor*> advisors;
  if (grade > 0) {
    owned.push_back(std::make_unique<MazeAdvisor>(env, grade));
    owned.push_back(std::make_unique<MazeAdvisor>(env, grade));
    advisors = {owned[0].get(), owned[1].get()};
  }
  Rng rng = derive_rng(seed, "train");
  return train_dm(env, advisors, config, episodes, rng, hooks);
}

// --- criterion 1: single-state golden trace ------------------------------

void criterion_1() {
  SingleStateDemoEnv env(1000);
  ActionSpace space({2, 2});
  std::vector<ScriptedSequenceAdvisor::Entry> script;
  script.push_back({{0, 0}, AdvisorSolution::deterministic({0, 0}, space)});
  script.push_back({{0, 0}, AdvisorSolution::uniform(space)});
  ScriptedSequenceAdvisor advisor(script);

  AeConfig config;
  config.alpha = 0.9;
  config.beta = 0.9;
  config.eta = 0.0;
  config.eta_prime = 1.0;

  std::vector<double> trace;
  TrainHooks hooks;
  hooks.step_probe = [&](const std::vector<std::vector<JointQTable>>& views) {
    trace.push_back(views[0][0].at(0, JointAction{0, 0}));
  };
  Rng rng(1);
  train_ae(env, advisor, config, 1, rng, hooks);

  bool ok = trace.size() >= 2 && std::abs(trace[0] - 1.8) <= 1e-12 &&
            std::abs(trace[1] - 2.3445) <= 1e-12;
  report(1, "single-state golden Q trace", ok,
         fmt("update1 %.15f update2 %.15f", trace[0], trace[1]));
}

// --- criterion 2: normalization golden rows ------------------------------

void criterion_2() {
  struct Row {
    double cr, rcr, mcr, expected;
  };
  const std::vector<Row> rows = {
      {3560, 930, 3800, 1.0},        {1700, 930, 3800, 0.3},
      {1030, 930, 3800, 0.1},        {930, 930, 3800, 0.0},
      {58000, -63000, 90000, 0.8},   {35000, -63000, 90000, 0.7},
      {-16000, -63000, 90000, 0.4},  {-63000, -63000, 90000, 0.0},
      {63000, -54000, 90000, 0.9},   {34000, -54000, 90000, 0.7},
      {-16400, -54000, 90000, 0.3},  {-54000, -54000, 90000, 0.0},
      {79000, -81000, 90000, 1.0},   {39000, -81000, 90000, 0.7},
      {-21000, -81000, 90000, 0.4},  {-81000, -81000, 90000, 0.0},
  };
  int bad = 0;
  for (const Row& row : rows) {
    double got = normalize_epsilon0(row.cr, row.rcr, row.mcr);
    if (std::abs(got - row.expected) > 1e-12) ++bad;
  }
  report(2, "normalization reproduces all sixteen table rows", bad == 0,
         fmt("%d/16 exact", 16 - bad));
}

// --- criterion 3: evaluation ordering across advisor grades --------------

void criterion_3() {
  AeConfig config;  // alpha .9, beta .9, eta .05, eta' .5
  const long episodes = 2000;
  double cr[5] = {0, 0, 0, 0, 0};
  for (int grade = 1; grade <= 4; ++grade)
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      cr[grade] += ae_cumulative({}, grade, seed, episodes, config) / 5.0;
  double rcr = 0.0;
  for (std::uint64_t seed = 11; seed <= 30; ++seed)
    rcr += ae_cumulative({}, 0, seed, episodes, config) / 20.0;

  bool ordered = cr[1] > cr[2] && cr[2] > cr[3] && cr[3] >= cr[4];
  double dev = std::abs(cr[4] - rcr) / std::abs(rcr);
  bool ok = ordered && dev <= 0.15;
  report(3, "evaluation orders the advisors and grade 4 matches RCR", ok,
         fmt("CR %.0f/%.0f/%.0f/%.0f RCR %.0f dev %.1f%%", cr[1], cr[2], cr[3], cr[4], rcr,
             100 * dev));
}

// --- criterion 4: evaluation Q converges to the advisor value ------------

void criterion_4() {
  GridMazeConfig mc = convergence_maze_ae();
  GridMazeEnv env(mc);
  MazeAdvisor advisor(env, 1);
  OracleConfig oconfig;
  Rng orng = derive_rng(99, "oracle");
  JointQTable oracle = advisor_value_q(env, advisor, oconfig, orng)[0];

  AeConfig config;
  config.eta = 1.0;  // fully exploratory behaviour; updates stay advisor-driven
  config.eta_prime = 0.0;
  const long episodes = 20000;

  double worst_ratio = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    TrainHooks hooks;
    hooks.mse_probe = [&](const std::vector<JointQTable>& t) { return mse(t[0], oracle); };
    hooks.mse_when = [&](long e) { return e < 100 || e >= episodes - 100; };
    GridMazeEnv run_env(mc);
    Rng rng = derive_rng(seed, "train");
    TrainResult r = train_ae(run_env, advisor, config, episodes, rng, hooks);
    double first = 0, last = 0;
    int nf = 0, nl = 0;
    for (const auto& e : r.episodes) {
      if (std::isnan(e.mse_to_oracle)) continue;
      if (e.episode < 100) {
        first += e.mse_to_oracle;
        ++nf;
      } else {
        last += e.mse_to_oracle;
        ++nl;
      }
    }
    worst_ratio = std::max(worst_ratio, (last / nl) / (first / nf));
  }
  report(4, "evaluation MSE to the advisor value drops below 5%", worst_ratio < 0.05,
         fmt("worst final/first ratio %.6f over 3 seeds", worst_ratio));
}

// --- criterion 5: decision-making Q converges to the Nash value ----------

void criterion_5() {
  // pre-learning on the default maze supplies the advisor influence
  AeConfig eval;
  double cr = 0, rcr = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cr += ae_cumulative({}, 1, seed, 2000, eval) / 5.0;
    rcr += ae_cumulative({}, 0, seed, 2000, eval) / 5.0;
  }
  double mcr = (1.0 - eval.eta) * 2.0 * 2000;
  double eps0 = normalize_epsilon0(cr, rcr, mcr);

  GridMazeConfig mc = convergence_maze_dm();
  GridMazeEnv env0(mc);
  const double beta = 0.5;
  JointQTable oracle = nash_q_identical_interest(env0, beta, 1e-10);

  const long episodes = 3000000;
  DmConfig config;
  config.alpha = 0.2;
  config.beta = beta;
  config.epsilon = Schedule::constant(std::min(0.2, 1.0 - eps0));
  config.epsilon_prime = Schedule{eps0, 0.0, episodes / 20};

  double worst_ratio = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    TrainHooks hooks;
    hooks.mse_probe = [&](const std::vector<JointQTable>& t) { return mse(t[0], oracle); };
    hooks.mse_when = [&](long e) { return e < 100 || e >= episodes - 100; };
    TrainResult r = dm_run(mc, 1, config, seed, episodes, hooks);
    double first = 0, last = 0;
    int nf = 0, nl = 0;
    for (const auto& e : r.episodes) {
      if (std::isnan(e.mse_to_oracle)) continue;
      if (e.episode < 100) {
        first += e.mse_to_oracle;
        ++nf;
      } else {
        last += e.mse_to_oracle;
        ++nl;
      }
    }
    worst_ratio = std::max(worst_ratio, (last / nl) / (first / nf));
  }
  report(5, "decision-making MSE to the Nash value drops below 5%", worst_ratio < 0.05,
         fmt("eps'0 %.1f, worst final/first ratio %.5f over 3 seeds", eps0, worst_ratio));
}

// --- criterion 6: decision-making ordering and baseline domination -------

void criterion_6() {
  const long episodes = 2000;
  const double ladder[5] = {0.0, 0.8, 0.4, 0.1, 0.0};

  std::vector<std::vector<double>> mean_cumulative(6, std::vector<double>(episodes, 0.0));
  for (int arm = 1; arm <= 5; ++arm) {  // 1..4 advisors, 5 = no-advisor baseline
    DmConfig config;
    config.alpha = 0.3;
    config.beta = 0.9;
    config.epsilon = Schedule{0.2, 0.0, 1500};
    config.epsilon_prime = Schedule{arm <= 4 ? ladder[arm] : 0.0, 0.0, 1500};
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      TrainResult r = dm_run({}, arm <= 4 ? arm : 0, config, seed, episodes);
      double acc = 0.0;
      for (long e = 0; e < episodes; ++e) {
        acc += r.episodes[e].rewards[0];
        mean_cumulative[arm][e] += acc / 5.0;
      }
    }
  }

  bool best_at_end = true;
  for (int arm = 2; arm <= 5; ++arm)
    if (mean_cumulative[1].back() < mean_cumulative[arm].back()) best_at_end = false;
  bool dominated = true;
  for (long e = 500; e < episodes; e += 100)
    if (mean_cumulative[1][e] <= mean_cumulative[5][e]) dominated = false;

  report(6, "best advisor leads decision-making and dominates the baseline",
         best_at_end && dominated,
         fmt("final cumulative %.0f/%.0f/%.0f/%.0f baseline %.0f", mean_cumulative[1].back(),
             mean_cumulative[2].back(), mean_cumulative[3].back(), mean_cumulative[4].back(),
             mean_cumulative[5].back()));
}

// --- criterion 7: recovery from forced bad advice -------------------------

void criterion_7() {
  const long episodes = 4000;
  auto final_100 = [&](double eps0, std::uint64_t seed) {
    DmConfig config;
    config.alpha = 0.3;
    config.beta = 0.9;
    config.epsilon = Schedule{0.3, 0.05, 2000};
    config.epsilon_prime = Schedule{eps0, 0.0, 2000};
    TrainResult r = dm_run({}, eps0 > 0 ? 4 : 0, config, seed, episodes);
    double m = 0.0;
    for (long e = episodes - 100; e < episodes; ++e) m += r.episodes[e].rewards[0];
    return m / 100.0;
  };

  double forced = 0.0, baseline = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    forced += final_100(0.5, seed) / 10.0;
    baseline += final_100(0.0, seed) / 10.0;
  }
  double rel = std::abs(forced - baseline) / std::abs(baseline);
  report(7, "forced bad advice is recovered from", rel <= 0.10,
         fmt("forced %.3f baseline %.3f rel diff %.1f%%", forced, baseline, 100 * rel));
}

// --- criterion 8: one-shot matrix game reaches the payoff table ----------

void criterion_8() {
  StageGame game{ActionSpace({2, 2}),
                 {{1.0, -0.5, 0.25, 2.0}, {1.0, -0.5, 0.25, 2.0}}};
  MatrixGameEnv env(game, 1);
  DmConfig config;
  config.alpha = 0.5;
  config.beta = 0.9;
  config.epsilon = Schedule::constant(1.0);  // uniform visits, 4 cells

  const long episodes = 160000;  // ~4e4 visits per joint action
  Rng rng = derive_rng(3, "train");
  TrainResult r = train_dm(env, {}, config, episodes, rng);
  double sup = 0.0;
  for (int flat = 0; flat < 4; ++flat) {
    sup = std::max(sup, std::abs(r.tables[0].at(0, flat) - game.payoffs[0][flat]));
    sup = std::max(sup, std::abs(r.tables[1].at(0, flat) - game.payoffs[1][flat]));
  }
  report(8, "one-shot matrix game converges to its payoff table", sup < 1e-2,
         fmt("sup-norm distance %.2e", sup));
}

// --- criterion 9: property suites -----------------------------------------

bool property_advisor_q() {
  Rng rng(424242);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + rng.uniform_int(3);
    std::vector<int> sizes(n);
    for (int& s : sizes) s = 1 + rng.uniform_int(4);
    ActionSpace space(sizes);
    auto sol = testing::random_solution(space, rng);
    auto q = testing::random_values(space.joint_count(), rng);
    double expected = testing::advisor_q_bruteforce(sol, q, space);
    if (std::abs(advisor_q(sol, q, space) - expected) > 1e-9) return false;
  }
  return true;
}

bool property_gradients() {
  Rng rng(515151);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> sizes{1 + rng.uniform_int(4), 1 + rng.uniform_int(5),
                           1 + rng.uniform_int(3)};
    Mlp net(sizes);
    net.init_random(rng);
    std::vector<double> input = testing::random_values(sizes.front(), rng, 1.5);
    std::vector<double> target = testing::random_values(sizes.back(), rng, 1.5);

    auto out = net.forward(input);
    std::vector<double> grad_out(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) grad_out[i] = 2.0 * (out[i] - target[i]);
    net.zero_grads();
    net.backward(grad_out);
    std::vector<double> analytic = net.grads();

    auto loss = [&]() {
      auto o = net.forward(input);
      double l = 0.0;
      for (std::size_t i = 0; i < target.size(); ++i)
        l += (o[i] - target[i]) * (o[i] - target[i]);
      return l;
    };
    for (std::size_t p = 0; p < net.params().size(); ++p) {
      double saved = net.params()[p];
      net.params()[p] = saved + h;
      double up = loss();
      net.params()[p] = saved - h;
      double down = loss();
      net.params()[p] = saved;
      double numeric = (up - down) / (2.0 * h);
      double scale = std::max({std::abs(numeric), std::abs(analytic[p]), 1e-6});
      worst = std::max(worst, std::abs(numeric - analytic[p]) / scale);
    }
  }
  return worst < 1e-4;
}

bool property_round_trips() {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "admiral_acceptance";
  fs::create_directories(dir);

  Rng rng(161616);
  JointQTable table(0, 40, ActionSpace({4, 4}));
  for (double& v : table.raw())
    v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform_int(13) - 6);
  std::string qpath = (dir / "acc.qt").string();
  save_qtable(table, qpath);
  if (!(load_qtable(qpath) == table)) return false;

  Mlp net({25, 16, 4});
  net.init_random(rng);
  std::string wpath = (dir / "acc.wt").string();
  save_weights(net.layer_sizes(), net.params(), wpath);
  std::vector<int> sizes;
  std::vector<double> params;
  load_weights(wpath, sizes, params);
  return sizes == net.layer_sizes() && params == net.params();
}

bool property_mixture(double p_advisor, double p_random) {
  SingleStateDemoEnv env(10);
  ActionSpace space({4, 4});
  JointQTable q(0, 1, space);
  q.set(0, JointAction{3, 0}, 1.0);  // greedy own action is 3

  struct OneAdvisor final : Advisor {
    AdvisorSolution solve(const Env&, StateId) override {
      return AdvisorSolution::deterministic({1, 1}, ActionSpace({4, 4}));
    }
    std::unique_ptr<Advisor> clone() const override {
      return std::make_unique<OneAdvisor>(*this);
    }
  } advisor;

  Rng rng(717171);
  const int draws = 100000;
  int counts[4] = {0, 0, 0, 0};
  for (int i = 0; i < draws; ++i)
    ++counts[select_mixed_action(q, env, 0, {0, 0}, 0, &advisor, p_advisor, p_random, rng)];

  double expected[4] = {p_random / 4, p_advisor + p_random / 4, p_random / 4,
                        (1 - p_advisor - p_random) + p_random / 4};
  for (int a = 0; a < 4; ++a) {
    double sigma = std::sqrt(expected[a] * (1 - expected[a]) * draws);
    if (std::abs(counts[a] - expected[a] * draws) > 3 * sigma + 1e-9) return false;
  }
  return true;
}

bool property_copy_coherence() {
  GridMazeEnv env;
  std::vector<std::unique_ptr<Advisor>> owned;
  owned.push_back(std::make_unique<MazeAdvisor>(env, 2));
  owned.push_back(std::make_unique<MazeAdvisor>(env, 2));
  std::vector<Advisor*> advisors{owned[0].get(), owned[1].get()};
  DmConfig config;
  config.alpha = 0.4;
  config.epsilon = Schedule::constant(0.3);
  config.epsilon_prime = Schedule::constant(0.5);

  bool coherent = true;
  TrainHooks hooks;
  hooks.step_probe = [&](const std::vector<std::vector<JointQTable>>& views) {
    for (std::size_t j = 1; j < views.size(); ++j)
      for (std::size_t k = 0; k < views[j].size(); ++k)
        if (!(views[j][k].raw() == views[0][k].raw())) coherent = false;
  };
  Rng rng(818181);
  train_dm(env, advisors, config, 50, rng, hooks);
  return coherent;
}

void criterion_9() {
  bool aq = property_advisor_q();
  bool grads = property_gradients();
  bool files = property_round_trips();
  bool mix = property_mixture(0.45, 0.05) && property_mixture(0.5, 0.05) &&
             property_mixture(1.0, 0.0) && property_mixture(0.0, 1.0);
  bool coherence = property_copy_coherence();
  bool ok = aq && grads && files && mix && coherence;
  report(9, "property suites", ok,
         fmt("advisor_q %d, gradients %d, round-trips %d, mixture %d, coherence %d", aq, grads,
             files, mix, coherence));
}

// --- criterion 10: neural advisor benefit ---------------------------------

long episodes_to_threshold(const std::vector<EpisodeRecord>& eps, double threshold, int window) {
  for (std::size_t e = window; e <= eps.size(); ++e) {
    double m = 0.0;
    for (std::size_t i = e - window; i < e; ++i) m += eps[i].rewards[0];
    if (m / window >= threshold) return static_cast<long>(e);
  }
  return static_cast<long>(eps.size()) + 1;  // never reached in budget
}

void criterion_10() {
  const long episodes = 400;
  const double threshold = 1.0;  // trailing-20-episode mean reward
  std::vector<long> advised, baseline;

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (int mode = 0; mode < 2; ++mode) {
      GridMazeEnv env;
      std::vector<std::unique_ptr<Advisor>> owned;
      std::vector<Advisor*> advisors;
      DmNnConfig config;
      config.epsilon = Schedule{0.2, 0.05, 300};
      if (mode == 0) {
        owned.push_back(std::make_unique<MazeAdvisor>(env, 1));
        owned.push_back(std::make_unique<MazeAdvisor>(env, 1));
        advisors = {owned[0].get(), owned[1].get()};
        config.epsilon_prime = Schedule{0.8, 0.0, 300};
      }
      Rng rng = derive_rng(seed, "train");
      NnTrainResult r = train_dm_nn(env, advisors, config, episodes, rng);
      (mode == 0 ? advised : baseline)
          .push_back(episodes_to_threshold(r.episodes, threshold, 20));
    }
  }
  auto median = [](std::vector<long> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  long med_adv = median(advised);
  long med_base = median(baseline);
  report(10, "neural decision-making reaches the reward threshold faster with advice",
         med_adv < med_base, fmt("median episodes: advised %ld, baseline %ld", med_adv, med_base));
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  auto run = [&](int number, void (*fn)()) {
    auto t0 = clock::now();
    fn();
    double s = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("             criterion %2d took %.1fs\n", number, s);
  };
  run(1, criterion_1);
  run(2, criterion_2);
  run(3, criterion_3);
  run(4, criterion_4);
  run(5, criterion_5);
  run(6, criterion_6);
  run(7, criterion_7);
  run(8, criterion_8);
  run(9, criterion_9);
  run(10, criterion_10);

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
