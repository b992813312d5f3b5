#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "admiral/harness.hpp"
#include "admiral/io.hpp"

namespace {

using namespace admiral;
using nlohmann::json;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    seeds.push_back(std::stoull(token));
  }
  if (seeds.empty()) throw ConfigError("--seeds needs a comma-separated list");
  return seeds;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::string seeds_override;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* opt = cmd->add_option("--config", args.config_path, "experiment config file");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seeds", args.seeds_override, "comma-separated seed override");
  cmd->add_option("--jobs", args.jobs, "parallel runs");
}

ExperimentConfig load_with_overrides(const CommonArgs& args) {
  ExperimentConfig config = load_experiment_config(args.config_path);
  if (!args.seeds_override.empty()) config.seeds = parse_seed_list(args.seeds_override);
  return config;
}

int cmd_train(const CommonArgs& args) {
  ExperimentConfig config = load_with_overrides(args);
  auto runs = run_experiment(config, args.out_dir, args.jobs);
  for (const auto& run : runs)
    std::printf("seed %llu: %s  %s\n", static_cast<unsigned long long>(run.seed),
                run.csv_path.c_str(), run.model_path.c_str());
  return 0;
}

int cmd_evaluate(const CommonArgs& args, double mcr_override, bool offline, double cr, double rcr,
                 double mcr) {
  if (offline) {
    double value = normalize_epsilon0(cr, rcr, mcr);
    std::printf("epsilon_prime_0 %.1f\n", value);
    return 0;
  }
  if (args.config_path.empty()) throw ConfigError("evaluate-advisor needs --config");
  ExperimentConfig config = load_with_overrides(args);
  if (config.advisors.empty()) throw ConfigError("evaluate-advisor needs at least one advisor");

  std::vector<AdvisorEvaluation> rows;
  for (const AdvisorSpec& candidate : config.advisors) {
    std::optional<double> override_value;
    if (mcr_override > 0.0) override_value = mcr_override;
    rows.push_back(evaluate_advisor(config, candidate, args.out_dir, override_value, args.jobs));
  }
  std::string report_path = args.out_dir + "/" + config.name + "_evaluation.json";
  write_evaluation_report(report_path, rows);
  std::printf("%-16s %14s %14s %14s %8s\n", "advisor", "CR", "RCR", "MCR", "eps'0");
  for (const auto& row : rows)
    std::printf("%-16s %14.1f %14.1f %14.1f %8.1f\n", row.advisor.c_str(), row.cr, row.rcr,
                row.mcr, row.epsilon_prime_0);
  std::printf("report: %s\n", report_path.c_str());
  return 0;
}

int cmd_pipeline(const CommonArgs& args) {
  ExperimentConfig config = load_with_overrides(args);
  if (config.advisors.empty()) throw ConfigError("pipeline needs at least one candidate advisor");
  if (config.learner != LearnerKind::dm && config.learner != LearnerKind::dm_nn &&
      config.learner != LearnerKind::dm_ac)
    throw ConfigError("pipeline's training stage must be a decision-making learner");

  std::vector<AdvisorEvaluation> rows;
  std::size_t best = 0;
  for (std::size_t i = 0; i < config.advisors.size(); ++i) {
    rows.push_back(evaluate_advisor(config, config.advisors[i], args.out_dir, {}, args.jobs));
    if (rows[i].epsilon_prime_0 > rows[best].epsilon_prime_0) best = i;
  }
  std::string report_path = args.out_dir + "/" + config.name + "_evaluation.json";
  write_evaluation_report(report_path, rows);

  double eps0 = rows[best].epsilon_prime_0;
  std::printf("pre-learning selected %s with epsilon_prime_0 = %.1f\n",
              rows[best].advisor.c_str(), eps0);

  ExperimentConfig train = config;
  train.advisors = {config.advisors[best]};
  switch (train.learner) {
    case LearnerKind::dm: train.dm.epsilon_prime.start = eps0; break;
    case LearnerKind::dm_nn: train.dm_nn.epsilon_prime.start = eps0; break;
    case LearnerKind::dm_ac: train.ac.epsilon_prime.start = eps0; break;
    default: break;
  }
  auto runs = run_experiment(train, args.out_dir, args.jobs);
  for (const auto& run : runs)
    std::printf("seed %llu: %s  %s\n", static_cast<unsigned long long>(run.seed),
                run.csv_path.c_str(), run.model_path.c_str());
  return 0;
}

int cmd_oracle(const CommonArgs& args, const std::string& kind, bool with_run) {
  ExperimentConfig config = load_with_overrides(args);
  std::string oracle_kind = kind.empty() ? config.mse_oracle : kind;
  if (oracle_kind.empty()) throw ConfigError("oracle command needs --kind or mse_oracle");

  std::filesystem::create_directories(args.out_dir);
  JointQTable table = build_oracle_table(config, oracle_kind, config.seeds.front());
  std::string table_path = args.out_dir + "/" + config.name + "_oracle_" + oracle_kind + ".qt";
  save_qtable(table, table_path);

  std::unique_ptr<Env> env = make_env(config.env);
  double beta = config.learner == LearnerKind::ae ? config.ae.beta : config.dm.beta;
  if (oracle_kind == "nash")
    std::printf("bellman residual: %.3e\n", bellman_residual(*env, table, beta));
  // rollouts stop at the step cap; discounting bounds what the tail could add
  int horizon = config.oracle.horizon > 0 ? config.oracle.horizon : env->step_cap();
  double truncation_bound =
      std::pow(beta, horizon) * env->max_episode_return() / (1.0 - beta);
  std::printf("horizon truncation bound: %.3e\n", truncation_bound);
  std::printf("oracle table: %s\n", table_path.c_str());

  if (with_run) {
    ExperimentConfig rerun = config;
    rerun.mse_oracle = oracle_kind;
    auto runs = run_experiment(rerun, args.out_dir, args.jobs);
    for (const auto& run : runs)
      std::printf("seed %llu: %s\n", static_cast<unsigned long long>(run.seed),
                  run.csv_path.c_str());
  }
  return 0;
}

int cmd_plot(const std::string& config_path, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open config: " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad plot config: ") + e.what());
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != 1)
    throw ConfigError("config must declare format_version 1");
  if (!j.contains("plot")) throw ConfigError("plot command needs a 'plot' section");
  const json& p = j["plot"];
  for (const auto& item : p.items()) {
    static const std::vector<std::string> allowed{"title", "x_label", "y_label", "output",
                                                  "series"};
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw ConfigError("unknown key '" + item.key() + "' in plot");
  }

  std::vector<PlotSeries> series;
  for (const json& s : p.at("series")) {
    for (const auto& item : s.items()) {
      static const std::vector<std::string> allowed{"label", "column", "csvs"};
      if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
        throw ConfigError("unknown key '" + item.key() + "' in plot series");
    }
    PlotSeries ps;
    ps.label = s.value("label", "series");
    std::string column = s.value("column", "cumulative_reward");
    for (const auto& csv : s.at("csvs").get<std::vector<std::string>>())
      ps.runs.push_back(read_csv_column(csv, column));
    series.push_back(std::move(ps));
  }

  std::filesystem::create_directories(out_dir);
  std::string output = out_dir + "/" + p.value("output", std::string("plot.svg"));
  emit_plot(series, p.value("title", std::string()), p.value("x_label", std::string("episode")),
            p.value("y_label", std::string("value")), output);
  std::printf("plot: %s\n", output.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"advisor-guided multi-agent Q-learning toolkit"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, pipe_args, oracle_args;
  std::string plot_config, plot_out = "out";
  double mcr_override = 0.0;
  bool offline = false;
  double off_cr = 0.0, off_rcr = 0.0, off_mcr = 0.0;
  std::string oracle_kind;
  bool oracle_with_run = false;

  CLI::App* train = app.add_subcommand("train", "run a training experiment");
  add_common(train, train_args);

  CLI::App* evaluate = app.add_subcommand("evaluate-advisor", "pre-learning advisor evaluation");
  add_common(evaluate, eval_args, /*config_required=*/false);
  evaluate->add_option("--mcr", mcr_override, "user-supplied maximum cumulative reward");
  evaluate->add_flag("--offline", offline, "normalize user-supplied numbers only");
  evaluate->add_option("--cr", off_cr, "offline: candidate cumulative reward");
  evaluate->add_option("--rcr", off_rcr, "offline: random-advisor cumulative reward");
  evaluate->add_option("--offline-mcr", off_mcr, "offline: maximum cumulative reward");

  CLI::App* pipeline = app.add_subcommand("pipeline", "evaluation followed by training");
  add_common(pipeline, pipe_args);

  CLI::App* oracle = app.add_subcommand("oracle", "brute-force value tables");
  add_common(oracle, oracle_args);
  oracle->add_option("--kind", oracle_kind, "nash | advisor_value");
  oracle->add_flag("--with-run", oracle_with_run, "also rerun training with an MSE trace");

  CLI::App* plot = app.add_subcommand("plot", "render CSV series to SVG");
  plot->add_option("--config", plot_config, "plot config file")->required();
  plot->add_option("--out", plot_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (evaluate->parsed())
      return cmd_evaluate(eval_args, mcr_override, offline, off_cr, off_rcr, off_mcr);
    if (pipeline->parsed()) return cmd_pipeline(pipe_args);
    if (oracle->parsed()) return cmd_oracle(oracle_args, oracle_kind, oracle_with_run);
    if (plot->parsed()) return cmd_plot(plot_config, plot_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
