#pragma once

#include <optional>
#include <string>

#include "admiral/env.hpp"
#include "admiral/neural.hpp"
#include "admiral/oracle.hpp"
#include "admiral/tabular.hpp"

namespace admiral {

struct EnvSpec {
  std::string preset = "grid_maze";  // grid_maze | single_state_demo | matrix_game
  std::string file;                  // optional grid maze description file
  int step_cap = 0;                  // 0: preset default
  // matrix game
  std::vector<int> action_sizes;
  std::vector<std::vector<double>> payoffs;  // [agent][joint action]
  int horizon = 1;
};

struct AdvisorSpec {
  std::string kind = "none";  // none | random | maze_grade | adaptive | demo_script
  int grade = 1;
  long switch_episode = 0;
};

enum class LearnerKind { dm, ae, dm_nn, ae_nn, dm_ac };

struct ExperimentConfig {
  std::string name = "experiment";
  EnvSpec env;
  LearnerKind learner = LearnerKind::dm;
  std::vector<AdvisorSpec> advisors;  // one entry shared by all agents, or one per agent
  long episodes = 1000;
  std::vector<std::uint64_t> seeds = {1};
  DmConfig dm;
  AeConfig ae;
  DmNnConfig dm_nn;
  AeNnConfig ae_nn;
  AcConfig ac;
  std::string mse_oracle;  // "" | nash | advisor_value
  long mse_every = 1;
  OracleConfig oracle;
  // pre-learning stage of the pipeline command (0/empty: reuse the main run's
  // episode and seed settings); the evaluation learner's constants live in
  // `ae` either way
  long pre_episodes = 0;
  std::vector<std::uint64_t> pre_seeds;
};

ExperimentConfig load_experiment_config(const std::string& path);
LearnerKind parse_learner_kind(const std::string& text);

std::unique_ptr<Env> make_env(const EnvSpec& spec);
std::unique_ptr<Advisor> make_advisor(const AdvisorSpec& spec, const Env& env);

/// Per-seed artifacts of one training run.
struct RunArtifacts {
  std::uint64_t seed = 0;
  std::vector<EpisodeRecord> episodes;
  std::string csv_path;
  std::string model_path;
};

/// Trains one seed of the configured experiment and writes
/// <out_dir>/<name>_seed<seed>.csv plus the agent-0 model file.
RunArtifacts run_experiment_seed(const ExperimentConfig& config, std::uint64_t seed,
                                 const std::string& out_dir);

/// All seeds, optionally in parallel. Returns artifacts in seed order.
std::vector<RunArtifacts> run_experiment(const ExperimentConfig& config,
                                         const std::string& out_dir, int jobs = 1);

/// CSV schema shared by every training command:
///   episode,seed,agent,episode_reward,cumulative_reward,epsilon,epsilon_prime,mse_to_oracle
/// (mse column blank when it was not computed).
void write_metrics_csv(const std::string& path, std::uint64_t seed,
                       const std::vector<EpisodeRecord>& episodes);

struct AdvisorEvaluation {
  std::string advisor;
  double cr = 0.0;        // mean cumulative reward with the candidate advisor
  double rcr = 0.0;       // same with the random advisor
  double mcr_raw = 0.0;   // analytic per-episode max times episodes
  double mcr = 0.0;       // adjusted for the random-exploration fraction
  double epsilon_prime_0 = 0.0;
};

/// Pre-learning phase: runs the evaluation learner with the candidate and
/// with the random advisor, derives the normalized advisor-influence value.
/// `mcr_override` replaces the analytic maximum when the caller knows better.
AdvisorEvaluation evaluate_advisor(const ExperimentConfig& config, const AdvisorSpec& candidate,
                                   const std::string& out_dir,
                                   std::optional<double> mcr_override = {}, int jobs = 1);

void write_evaluation_report(const std::string& path,
                             const std::vector<AdvisorEvaluation>& rows);

/// Mean cumulative reward of agent 0 at the final episode.
double final_cumulative_reward(const std::vector<RunArtifacts>& runs);

/// Builds the configured oracle table for the experiment's environment.
JointQTable build_oracle_table(const ExperimentConfig& config, const std::string& kind,
                               std::uint64_t seed);

/// One polyline per series with a mean +/- standard-deviation band across
/// runs; writes a self-contained SVG file.
struct PlotSeries {
  std::string label;
  std::vector<std::vector<double>> runs;  // [run][point]
};
void emit_plot(const std::vector<PlotSeries>& series, const std::string& title,
               const std::string& x_label, const std::string& y_label, const std::string& path);

/// Column extraction helper for plot inputs: values of `column` restricted to
/// agent 0 rows, ordered by episode.
std::vector<double> read_csv_column(const std::string& path, const std::string& column);

}  // namespace admiral
