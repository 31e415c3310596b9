#pragma once

// Configuration-driven pipeline: generate -> simulate -> estimate -> decide
// -> compare, plus the Monte-Carlo recovery experiment. The command-line tool
// is a thin wrapper over the cmd_* functions below.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrdn/io.hpp"
#include "lrdn/topology.hpp"

namespace lrdn {

struct SimConfig {
  Index T = 200;
  int burn_in = kDefaultBurnIn;
};

struct DecisionConfig {
  double alpha = 0.01;
  Correction correction = Correction::None;
  double zero_tol = kDefaultZeroTol;
  double h_norm_threshold = 1e-6;
  double deterministic_tol = 1e-8;

  EdgeTestOptions edge_options() const { return {alpha, h_norm_threshold, deterministic_tol}; }
};

struct ExperimentConfig {
  GeneratorConfig generator;
  SimConfig sim;
  EstimateOptions estimation;
  DecisionConfig decision;
  PartitionOptions partition;
  int trials = 20;
  std::uint64_t master_seed = 1;
  /// Reuse generator.rng_seed for every trial instead of a fresh model.
  bool fixed_model = false;
  std::string outputs = "out";
};

/// 12 channels (m = 8, l = 4), 25 edges with the last y_l channel pinned to
/// pure noise, T = 200, alpha = 0.01.
ExperimentConfig default_config();

/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const json& j);
json to_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);
/// Throws InvalidConfig.
void check_config(const ExperimentConfig& config);

struct TrialResult {
  int trial = 0;
  std::uint64_t model_seed = 0;
  std::uint64_t sim_seed = 0;
  bool ok = false;
  std::string error;
  std::size_t true_edges = 0;
  std::size_t decided_edges = 0;
  GraphMetrics metrics;
};

struct ExperimentSummary {
  int trials = 0;
  int failed = 0;
  double exact_match_rate = 0.0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
};

struct ExperimentReport {
  std::vector<TrialResult> trials;  ///< sorted by trial index
  ExperimentSummary summary;
  double runtime_seconds = 0.0;
};

/// Model seed = generator.rng_seed when fixed_model, else derive_seed(master, trial, 0);
/// simulation seed = derive_seed(master, trial, 1).
TrialResult run_trial(const ExperimentConfig& config, int trial);

/// Trials are independent; with Exec::Parallel they run on the OpenMP pool.
ExperimentReport run_experiment(const ExperimentConfig& config, Exec exec = Exec::Parallel);

/// trials.csv, summary.json and runtime.json (timing kept apart so the other
/// two files are byte-reproducible).
void write_experiment(const ExperimentReport& report, const ExperimentConfig& config, const std::string& dir);

struct PipelineResult {
  std::optional<Partition> partition;
  TimeSeries data;
  NetworkEstimate estimate;
  Decision decision;
};

/// Known partition: estimate H and S, then decide.
PipelineResult decide_pipeline(const TimeSeries& data, const ExperimentConfig& config, Exec exec = Exec::Parallel);
/// Unknown partition: partition_select first, then as decide_pipeline.
PipelineResult estimate_pipeline(const MatrixXd& raw, const ExperimentConfig& config, Exec exec = Exec::Parallel);

// Command implementations. Each returns the process exit code:
// 0 success, 1 configuration/input error, 2 numerical failure.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

struct CommandOptions {
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> trials;
  std::string format = "json";  ///< json, csv or dot
  std::optional<std::string> model_path;
  std::optional<std::string> data_path;
  std::optional<std::string> meta_path;
  std::optional<std::string> estimated_path;
  std::optional<std::string> truth_path;
};

/// Loads the config (or defaults) and applies the command-line overrides.
ExperimentConfig resolve_config(const CommandOptions& opts);

// Results go to out; validation reports, progress and errors go to log.
// The one-stream overloads send both to the same stream.
int cmd_generate(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_generate(const CommandOptions& opts, std::ostream& out);
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_simulate(const CommandOptions& opts, std::ostream& out);
int cmd_estimate(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_estimate(const CommandOptions& opts, std::ostream& out);
int cmd_decide(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_decide(const CommandOptions& opts, std::ostream& out);
int cmd_compare(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_compare(const CommandOptions& opts, std::ostream& out);
int cmd_run_experiment(const CommandOptions& opts, std::ostream& out, std::ostream& log);
int cmd_run_experiment(const CommandOptions& opts, std::ostream& out);

}  // namespace lrdn
