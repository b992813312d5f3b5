#include "admiral/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "admiral/io.hpp"

namespace admiral {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

Schedule parse_schedule(const json& j, const std::string& where) {
  if (j.is_number()) return Schedule::constant(j.get<double>());
  reject_unknown(j, {"start", "end", "horizon"}, where);
  Schedule s;
  s.start = j.value("start", 0.0);
  s.end = j.value("end", 0.0);
  s.horizon = j.value("horizon", 1L);
  return s;
}

EnvSpec parse_env(const json& j) {
  reject_unknown(j, {"preset", "file", "step_cap", "action_sizes", "payoffs", "horizon"},
                 "environment");
  EnvSpec spec;
  spec.preset = j.value("preset", spec.preset);
  spec.file = j.value("file", spec.file);
  spec.step_cap = j.value("step_cap", spec.step_cap);
  if (j.contains("action_sizes")) spec.action_sizes = j["action_sizes"].get<std::vector<int>>();
  if (j.contains("payoffs")) spec.payoffs = j["payoffs"].get<std::vector<std::vector<double>>>();
  spec.horizon = j.value("horizon", spec.horizon);
  return spec;
}

AdvisorSpec parse_advisor(const json& j) {
  reject_unknown(j, {"kind", "grade", "switch_episode"}, "advisor");
  AdvisorSpec spec;
  spec.kind = j.value("kind", spec.kind);
  spec.grade = j.value("grade", spec.grade);
  spec.switch_episode = j.value("switch_episode", spec.switch_episode);
  return spec;
}

std::vector<int> parse_hidden(const json& j) { return j.get<std::vector<int>>(); }

void parse_params(const json& j, ExperimentConfig& c) {
  reject_unknown(j,
                 {"alpha", "beta", "epsilon", "epsilon_prime", "eta", "eta_prime", "hidden",
                  "learning_rate", "batch_size", "buffer_capacity", "target_sync_period",
                  "updates_per_episode", "critic_learning_rate", "actor_learning_rate",
                  "actor_local_obs", "advantage_signal"},
                 "params");
  switch (c.learner) {
    case LearnerKind::dm:
      c.dm.alpha = j.value("alpha", c.dm.alpha);
      c.dm.beta = j.value("beta", c.dm.beta);
      if (j.contains("epsilon")) c.dm.epsilon = parse_schedule(j["epsilon"], "params.epsilon");
      if (j.contains("epsilon_prime"))
        c.dm.epsilon_prime = parse_schedule(j["epsilon_prime"], "params.epsilon_prime");
      break;
    case LearnerKind::ae:
      c.ae.alpha = j.value("alpha", c.ae.alpha);
      c.ae.beta = j.value("beta", c.ae.beta);
      c.ae.eta = j.value("eta", c.ae.eta);
      c.ae.eta_prime = j.value("eta_prime", c.ae.eta_prime);
      break;
    case LearnerKind::dm_nn:
      if (j.contains("hidden")) c.dm_nn.hidden = parse_hidden(j["hidden"]);
      c.dm_nn.beta = j.value("beta", c.dm_nn.beta);
      c.dm_nn.learning_rate = j.value("learning_rate", c.dm_nn.learning_rate);
      c.dm_nn.batch_size = j.value("batch_size", c.dm_nn.batch_size);
      c.dm_nn.buffer_capacity = j.value("buffer_capacity", c.dm_nn.buffer_capacity);
      c.dm_nn.target_sync_period = j.value("target_sync_period", c.dm_nn.target_sync_period);
      c.dm_nn.updates_per_episode = j.value("updates_per_episode", c.dm_nn.updates_per_episode);
      if (j.contains("epsilon")) c.dm_nn.epsilon = parse_schedule(j["epsilon"], "params.epsilon");
      if (j.contains("epsilon_prime"))
        c.dm_nn.epsilon_prime = parse_schedule(j["epsilon_prime"], "params.epsilon_prime");
      break;
    case LearnerKind::ae_nn:
      if (j.contains("hidden")) c.ae_nn.hidden = parse_hidden(j["hidden"]);
      c.ae_nn.beta = j.value("beta", c.ae_nn.beta);
      c.ae_nn.learning_rate = j.value("learning_rate", c.ae_nn.learning_rate);
      c.ae_nn.batch_size = j.value("batch_size", c.ae_nn.batch_size);
      c.ae_nn.buffer_capacity = j.value("buffer_capacity", c.ae_nn.buffer_capacity);
      c.ae_nn.target_sync_period = j.value("target_sync_period", c.ae_nn.target_sync_period);
      c.ae_nn.updates_per_episode = j.value("updates_per_episode", c.ae_nn.updates_per_episode);
      c.ae_nn.eta = j.value("eta", c.ae_nn.eta);
      c.ae_nn.eta_prime = j.value("eta_prime", c.ae_nn.eta_prime);
      break;
    case LearnerKind::dm_ac:
      if (j.contains("hidden")) c.ac.hidden = parse_hidden(j["hidden"]);
      c.ac.beta = j.value("beta", c.ac.beta);
      c.ac.critic_learning_rate = j.value("critic_learning_rate", c.ac.critic_learning_rate);
      c.ac.actor_learning_rate = j.value("actor_learning_rate", c.ac.actor_learning_rate);
      if (j.contains("epsilon_prime"))
        c.ac.epsilon_prime = parse_schedule(j["epsilon_prime"], "params.epsilon_prime");
      c.ac.actor_local_obs = j.value("actor_local_obs", c.ac.actor_local_obs);
      c.ac.advantage_signal = j.value("advantage_signal", c.ac.advantage_signal);
      break;
  }
}

std::string advisor_name(const AdvisorSpec& spec) {
  if (spec.kind == "maze_grade") return "maze_grade" + std::to_string(spec.grade);
  if (spec.kind == "adaptive") return "adaptive" + std::to_string(spec.switch_episode);
  return spec.kind;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

LearnerKind parse_learner_kind(const std::string& text) {
  if (text == "dm") return LearnerKind::dm;
  if (text == "ae") return LearnerKind::ae;
  if (text == "dm-nn") return LearnerKind::dm_nn;
  if (text == "ae-nn") return LearnerKind::ae_nn;
  if (text == "dm-ac") return LearnerKind::dm_ac;
  throw ConfigError("unknown learner kind '" + text + "'");
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("bad config " + path + ": " + e.what());
  }

  reject_unknown(j,
                 {"format_version", "name", "environment", "learner", "advisor", "advisors",
                  "episodes", "seeds", "params", "mse_oracle", "mse_every", "oracle",
                  "pre_learning"},
                 path);
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
    throw ConfigError("config must declare format_version 1");

  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    if (j.contains("environment")) c.env = parse_env(j["environment"]);
    if (j.contains("learner")) c.learner = parse_learner_kind(j["learner"].get<std::string>());
    if (j.contains("advisor") && j.contains("advisors"))
      throw ConfigError("give either 'advisor' or 'advisors', not both");
    if (j.contains("advisor")) c.advisors = {parse_advisor(j["advisor"])};
    if (j.contains("advisors")) {
      for (const auto& a : j["advisors"]) c.advisors.push_back(parse_advisor(a));
    }
    c.episodes = j.value("episodes", c.episodes);
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("params")) parse_params(j["params"], c);
    c.mse_oracle = j.value("mse_oracle", c.mse_oracle);
    c.mse_every = j.value("mse_every", c.mse_every);
    if (j.contains("oracle")) {
      reject_unknown(j["oracle"], {"beta", "rollouts", "horizon", "tolerance"}, "oracle");
      c.oracle.beta = j["oracle"].value("beta", c.oracle.beta);
      c.oracle.rollouts = j["oracle"].value("rollouts", c.oracle.rollouts);
      c.oracle.horizon = j["oracle"].value("horizon", c.oracle.horizon);
      c.oracle.tolerance = j["oracle"].value("tolerance", c.oracle.tolerance);
    }
    if (j.contains("pre_learning")) {
      const json& p = j["pre_learning"];
      reject_unknown(p, {"episodes", "seeds", "alpha", "beta", "eta", "eta_prime"},
                     "pre_learning");
      c.pre_episodes = p.value("episodes", c.pre_episodes);
      if (p.contains("seeds")) c.pre_seeds = p["seeds"].get<std::vector<std::uint64_t>>();
      c.ae.alpha = p.value("alpha", c.ae.alpha);
      c.ae.beta = p.value("beta", c.ae.beta);
      c.ae.eta = p.value("eta", c.ae.eta);
      c.ae.eta_prime = p.value("eta_prime", c.ae.eta_prime);
    }
  } catch (const json::exception& e) {
    throw ConfigError("bad config " + path + ": " + e.what());
  }

  if (c.episodes <= 0) throw ConfigError("episodes must be positive");
  if (c.seeds.empty()) throw ConfigError("seeds must be non-empty");
  std::vector<std::uint64_t> sorted = c.seeds;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("seeds must be distinct");
  if (!c.mse_oracle.empty() && c.mse_oracle != "nash" && c.mse_oracle != "advisor_value")
    throw ConfigError("mse_oracle must be 'nash' or 'advisor_value'");
  return c;
}

std::unique_ptr<Env> make_env(const EnvSpec& spec) {
  if (spec.preset == "grid_maze") {
    GridMazeConfig mc = spec.file.empty() ? GridMazeConfig{} : load_maze_config(spec.file);
    if (spec.step_cap > 0) mc.step_cap = spec.step_cap;
    return std::make_unique<GridMazeEnv>(mc);
  }
  if (spec.preset == "single_state_demo") {
    return std::make_unique<SingleStateDemoEnv>(spec.step_cap > 0 ? spec.step_cap : 1000);
  }
  if (spec.preset == "matrix_game") {
    if (spec.action_sizes.empty() || spec.payoffs.empty())
      throw ConfigError("matrix_game needs action_sizes and payoffs");
    StageGame game{ActionSpace(spec.action_sizes), spec.payoffs};
    return std::make_unique<MatrixGameEnv>(std::move(game), spec.horizon);
  }
  throw ConfigError("unknown environment preset '" + spec.preset + "'");
}

std::unique_ptr<Advisor> make_advisor(const AdvisorSpec& spec, const Env& env) {
  if (spec.kind == "none") return nullptr;
  if (spec.kind == "random") return std::make_unique<RandomAdvisor>();
  if (spec.kind == "maze_grade" || spec.kind == "adaptive") {
    const auto* maze = dynamic_cast<const GridMazeEnv*>(&env);
    if (maze == nullptr) throw ConfigError("advisor kind '" + spec.kind + "' needs a grid maze");
    if (spec.kind == "maze_grade") return make_maze_advisor(*maze, spec.grade);
    return std::make_unique<ScriptedAdaptiveAdvisor>(
        *maze, spec.switch_episode < 0 ? ScriptedAdaptiveAdvisor::kNever : spec.switch_episode);
  }
  if (spec.kind == "demo_script") {
    // the single-state walkthrough: a one-hot solution first, then fifty-fifty
    ActionSpace space({2, 2});
    std::vector<ScriptedSequenceAdvisor::Entry> script;
    script.push_back({{0, 0}, AdvisorSolution::deterministic({0, 0}, space)});
    script.push_back({{0, 0}, AdvisorSolution::uniform(space)});
    return std::make_unique<ScriptedSequenceAdvisor>(std::move(script));
  }
  throw ConfigError("unknown advisor kind '" + spec.kind + "'");
}

void write_metrics_csv(const std::string& path, std::uint64_t seed,
                       const std::vector<EpisodeRecord>& episodes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "episode,seed,agent,episode_reward,cumulative_reward,epsilon,epsilon_prime,"
         "mse_to_oracle\n";
  std::vector<double> cumulative;
  for (const EpisodeRecord& rec : episodes) {
    if (cumulative.size() < rec.rewards.size()) cumulative.resize(rec.rewards.size(), 0.0);
    for (std::size_t agent = 0; agent < rec.rewards.size(); ++agent) {
      cumulative[agent] += rec.rewards[agent];
      out << rec.episode << ',' << seed << ',' << agent << ',' << format_double(rec.rewards[agent])
          << ',' << format_double(cumulative[agent]) << ',' << format_double(rec.epsilon) << ','
          << format_double(rec.epsilon_prime) << ',';
      if (!std::isnan(rec.mse_to_oracle)) out << format_double(rec.mse_to_oracle);
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

JointQTable build_oracle_table(const ExperimentConfig& config, const std::string& kind,
                               std::uint64_t seed) {
  std::unique_ptr<Env> env = make_env(config.env);
  if (kind == "nash") {
    double beta = config.learner == LearnerKind::ae ? config.ae.beta : config.dm.beta;
    OracleConfig oc = config.oracle;
    oc.beta = beta;
    return nash_q_identical_interest(*env, oc.beta, oc.tolerance);
  }
  if (kind == "advisor_value") {
    if (config.advisors.empty()) throw ConfigError("advisor_value oracle needs an advisor");
    std::unique_ptr<Advisor> advisor = make_advisor(config.advisors.front(), *env);
    if (!advisor) throw ConfigError("advisor_value oracle needs an advisor");
    OracleConfig oc = config.oracle;
    oc.beta = config.learner == LearnerKind::ae ? config.ae.beta : config.dm.beta;
    Rng rng = derive_rng(seed, "oracle");
    return advisor_value_q(*env, *advisor, oc, rng)[0];
  }
  throw ConfigError("unknown oracle kind '" + kind + "'");
}

RunArtifacts run_experiment_seed(const ExperimentConfig& config, std::uint64_t seed,
                                 const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::unique_ptr<Env> env = make_env(config.env);
  const int n = env->agent_count();

  // one advisor instance per agent; a single spec is shared by cloning
  std::vector<std::unique_ptr<Advisor>> advisors;
  if (!config.advisors.empty()) {
    if (config.advisors.size() != 1 && static_cast<int>(config.advisors.size()) != n)
      throw ConfigError("advisor list must have one entry or one per agent");
    for (int j = 0; j < n; ++j) {
      const AdvisorSpec& spec =
          config.advisors.size() == 1 ? config.advisors.front() : config.advisors[j];
      advisors.push_back(make_advisor(spec, *env));
    }
  }
  std::vector<Advisor*> advisor_ptrs;
  bool any_advisor = false;
  for (auto& a : advisors) {
    advisor_ptrs.push_back(a.get());
    any_advisor = any_advisor || a != nullptr;
  }
  if (!any_advisor) advisor_ptrs.clear();

  TrainHooks hooks;
  JointQTable oracle_table;
  if (!config.mse_oracle.empty()) {
    if (config.learner != LearnerKind::dm && config.learner != LearnerKind::ae)
      throw ConfigError("mse_oracle is only available for the tabular learners");
    oracle_table = build_oracle_table(config, config.mse_oracle, seed);
    hooks.mse_probe = [&oracle_table](const std::vector<JointQTable>& tables) {
      return mse(tables[0], oracle_table);
    };
    long every = std::max<long>(1, config.mse_every);
    hooks.mse_when = [every](long episode) { return episode % every == 0; };
  }

  Rng rng = derive_rng(seed, "train");
  RunArtifacts artifacts;
  artifacts.seed = seed;

  std::string stem = out_dir + "/" + config.name + "_seed" + std::to_string(seed);
  artifacts.csv_path = stem + ".csv";

  switch (config.learner) {
    case LearnerKind::dm: {
      TrainResult r = train_dm(*env, advisor_ptrs, config.dm, config.episodes, rng, hooks);
      artifacts.episodes = std::move(r.episodes);
      artifacts.model_path = stem + ".qt";
      save_qtable(r.tables[0], artifacts.model_path);
      break;
    }
    case LearnerKind::ae: {
      if (advisor_ptrs.empty() || advisor_ptrs[0] == nullptr)
        throw ConfigError("the evaluation learner needs an advisor");
      TrainResult r = train_ae(*env, *advisor_ptrs[0], config.ae, config.episodes, rng, hooks);
      artifacts.episodes = std::move(r.episodes);
      artifacts.model_path = stem + ".qt";
      save_qtable(r.tables[0], artifacts.model_path);
      break;
    }
    case LearnerKind::dm_nn: {
      NnTrainResult r = train_dm_nn(*env, advisor_ptrs, config.dm_nn, config.episodes, rng);
      artifacts.episodes = std::move(r.episodes);
      artifacts.model_path = stem + ".wt";
      save_weights(r.eval_nets[0].layer_sizes(), r.eval_nets[0].params(), artifacts.model_path);
      break;
    }
    case LearnerKind::ae_nn: {
      if (advisor_ptrs.empty() || advisor_ptrs[0] == nullptr)
        throw ConfigError("the evaluation learner needs an advisor");
      NnTrainResult r = train_ae_nn(*env, *advisor_ptrs[0], config.ae_nn, config.episodes, rng);
      artifacts.episodes = std::move(r.episodes);
      artifacts.model_path = stem + ".wt";
      save_weights(r.eval_nets[0].layer_sizes(), r.eval_nets[0].params(), artifacts.model_path);
      break;
    }
    case LearnerKind::dm_ac: {
      AcTrainResult r = train_dm_ac(*env, advisor_ptrs, config.ac, config.episodes, rng);
      artifacts.episodes = std::move(r.episodes);
      artifacts.model_path = stem + ".wt";
      save_weights(r.agents[0].actor.layer_sizes(), r.agents[0].actor.params(),
                   artifacts.model_path);
      break;
    }
  }

  write_metrics_csv(artifacts.csv_path, seed, artifacts.episodes);
  return artifacts;
}

std::vector<RunArtifacts> run_experiment(const ExperimentConfig& config,
                                         const std::string& out_dir, int jobs) {
  std::vector<RunArtifacts> out(config.seeds.size());
  if (jobs <= 1) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i)
      out[i] = run_experiment_seed(config, config.seeds[i], out_dir);
    return out;
  }
  std::size_t next = 0;
  while (next < config.seeds.size()) {
    std::size_t batch = std::min<std::size_t>(jobs, config.seeds.size() - next);
    std::vector<std::future<RunArtifacts>> futs;
    for (std::size_t k = 0; k < batch; ++k) {
      std::uint64_t seed = config.seeds[next + k];
      futs.push_back(std::async(std::launch::async, [&config, seed, &out_dir] {
        return run_experiment_seed(config, seed, out_dir);
      }));
    }
    for (std::size_t k = 0; k < batch; ++k) out[next + k] = futs[k].get();
    next += batch;
  }
  return out;
}

double final_cumulative_reward(const std::vector<RunArtifacts>& runs) {
  double acc = 0.0;
  for (const RunArtifacts& run : runs) {
    double total = 0.0;
    for (const EpisodeRecord& rec : run.episodes) total += rec.rewards.at(0);
    acc += total;
  }
  return runs.empty() ? 0.0 : acc / static_cast<double>(runs.size());
}

AdvisorEvaluation evaluate_advisor(const ExperimentConfig& config, const AdvisorSpec& candidate,
                                   const std::string& out_dir,
                                   std::optional<double> mcr_override, int jobs) {
  ExperimentConfig eval = config;
  eval.learner = LearnerKind::ae;
  eval.mse_oracle.clear();
  if (config.pre_episodes > 0) eval.episodes = config.pre_episodes;
  if (!config.pre_seeds.empty()) eval.seeds = config.pre_seeds;

  AdvisorEvaluation row;
  row.advisor = advisor_name(candidate);

  eval.advisors = {candidate};
  eval.name = config.name + "_eval_" + row.advisor;
  row.cr = final_cumulative_reward(run_experiment(eval, out_dir, jobs));

  AdvisorSpec random_spec;
  random_spec.kind = "random";
  eval.advisors = {random_spec};
  eval.name = config.name + "_eval_random_baseline";
  row.rcr = final_cumulative_reward(run_experiment(eval, out_dir, jobs));

  std::unique_ptr<Env> env = make_env(config.env);
  row.mcr_raw = env->max_episode_return() * static_cast<double>(eval.episodes);
  row.mcr = mcr_override ? *mcr_override : (1.0 - eval.ae.eta) * row.mcr_raw;
  row.epsilon_prime_0 = normalize_epsilon0(row.cr, row.rcr, row.mcr);
  return row;
}

void write_evaluation_report(const std::string& path,
                             const std::vector<AdvisorEvaluation>& rows) {
  json j;
  j["format_version"] = 1;
  j["rows"] = json::array();
  for (const AdvisorEvaluation& row : rows) {
    j["rows"].push_back({{"advisor", row.advisor},
                         {"cr", row.cr},
                         {"rcr", row.rcr},
                         {"mcr_raw", row.mcr_raw},
                         {"mcr", row.mcr},
                         {"epsilon_prime_0", row.epsilon_prime_0}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::vector<double> read_csv_column(const std::string& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty csv: " + path);

  auto split = [](const std::string& text) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(text);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!text.empty() && text.back() == ',') fields.push_back("");
    return fields;
  };

  std::vector<std::string> header = split(line);
  auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) throw ConfigError("csv " + path + " has no column '" + column + "'");
  std::size_t target = static_cast<std::size_t>(it - header.begin());
  auto agent_it = std::find(header.begin(), header.end(), "agent");
  std::size_t agent_col = agent_it == header.end() ? header.size()
                                                   : static_cast<std::size_t>(agent_it - header.begin());

  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields = split(line);
    if (agent_col < fields.size() && fields[agent_col] != "0") continue;
    if (target >= fields.size() || fields[target].empty()) continue;
    values.push_back(std::stod(fields[target]));
  }
  return values;
}

}  // namespace admiral
