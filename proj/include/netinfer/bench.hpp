#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "netinfer/classify.hpp"

namespace netinfer {

// One experimental regime: graph ensemble, noise model, sampling schedule,
// methods under test, feature and training settings, output paths. Parsed
// from flat `section.key = value` text; unknown or duplicate keys are errors.
struct ExperimentConfig {
  // regime
  std::string id = "regime";
  int n_nodes = 0;
  int n_observed = 0;  // 0 = observe every node
  double p = 0.0;
  bool directed = false;
  double alpha = 0.0;
  double rho = 0.0;
  std::string graph_file;  // optional fixed adjacency; overrides p

  // noise
  double sigma2 = 0.0;
  double beta = 0.0;
  double osc = 0.0;
  double intervention = 0.0;  // per-node extra excitation variance

  // data
  std::vector<long long> checkpoints;
  long long length = 0;  // 0 = auto: largest checkpoint + needed lag
  int burn_in = -1;      // -1 = auto
  int trials = 1;
  std::uint64_t seed = 1;

  std::vector<std::string> methods;

  // features
  int feature_d = 1;
  int feature_m = 4;

  // training
  FfnnConfig train;
  std::vector<double> beta_sweep;  // pooled training sweep; empty = {beta}

  // output
  std::string results_path;
  std::string model_path;
  bool timing_sidecar = true;

  // Largest lag any configured method reads.
  int max_lag_needed() const;
  long long samples_needed() const;  // largest checkpoint + max lag
  void validate() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// One benchmark measurement. status is "ok" exactly when accuracy is valid;
// failed cells carry an error tag and a NaN accuracy. Wall time goes to a
// sidecar file so the main CSV stays byte-reproducible across runs.
struct ResultRow {
  std::string method;
  std::string regime;
  double beta = 0.0;
  long long n = 0;
  std::uint64_t trial_seed = 0;
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
  double wall_time = 0.0;  // seconds, excluded from the primary CSV
};

struct BenchResult {
  std::vector<ResultRow> rows;
  bool partial_failure = false;
};

using RowSink = std::function<void(const ResultRow&)>;

// Runs `trials` independent realizations of the regime. Each trial simulates
// once up to the largest checkpoint while streaming lag moments, then scores
// every (checkpoint, method) cell. A failing cell or trial becomes tagged
// rows and the run continues. Rows reach `sink` in deterministic order (trial
// major, then checkpoint, then method) regardless of `threads`.
BenchResult run_benchmark(const ExperimentConfig& config, int threads = 1,
                          const RowSink& sink = nullptr);

// Trains one network on pooled per-pair features of a single graph
// realization (beta sweep x checkpoints, each dataset centered before
// pooling), then replays the stored feature scaling on every test regime.
struct TrainOutcome {
  FfnnModel model;
  double training_accuracy = 0.0;  // over the pooled training pairs
  std::vector<ResultRow> rows;     // per-dataset training rows, then test rows
  bool partial_failure = false;
};
TrainOutcome train_and_generalize(const ExperimentConfig& train_config,
                                  const std::vector<ExperimentConfig>& test_configs,
                                  int threads = 1);

// CSV plumbing. The primary file holds exactly header + one line per row.
std::string result_csv_header();
std::string format_result_row(const ResultRow& row);
void write_results_csv(const std::string& path, const std::vector<ResultRow>& rows,
                       bool timing_sidecar);
std::vector<ResultRow> read_results_csv(const std::string& path);

// Accuracy mean/spread grouped by (method, regime, beta, n) in first-seen
// order. Failed rows are excluded from the moments and counted separately.
struct SummaryRow {
  std::string method;
  std::string regime;
  double beta = 0.0;
  long long n = 0;
  int count = 0;     // ok rows
  int failures = 0;  // tagged rows
  double mean_accuracy = 0.0;
  double sd_accuracy = 0.0;  // population convention
};
std::vector<SummaryRow> summarize_results(const std::vector<ResultRow>& rows);
std::string summary_csv_header();
std::string format_summary_row(const SummaryRow& row);

// Short stable tag for an exception, used in the CSV status column.
std::string error_tag(const std::exception& e);

}  // namespace netinfer
