#include "netinfer/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "netinfer/errors.hpp"
#include "netinfer/estimators.hpp"
#include "netinfer/features.hpp"
#include "netinfer/graph.hpp"
#include "netinfer/identifiability.hpp"
#include "netinfer/matrix_io.hpp"
#include "netinfer/moments.hpp"
#include "netinfer/noise.hpp"
#include "netinfer/rng.hpp"
#include "netinfer/simulate.hpp"

namespace netinfer {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs produce(0..count-1) on up to `threads` workers and hands each result
// to consume() in index order, as soon as the next index completes. consume
// runs on the calling thread only.
template <typename T>
void run_ordered(int count, int threads,
                 const std::function<T(int)>& produce,
                 const std::function<void(int, T&)>& consume) {
  if (count <= 0) return;
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) {
      T out = produce(i);
      consume(i, out);
    }
    return;
  }
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::unique_ptr<T>> done(count);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count) return;
        auto out = std::make_unique<T>(produce(i));
        {
          std::lock_guard<std::mutex> lock(mu);
          done[i] = std::move(out);
        }
        cv.notify_all();
      }
    });
  }
  for (int i = 0; i < count; ++i) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return done[i] != nullptr; });
    auto out = std::move(done[i]);
    lock.unlock();
    consume(i, *out);
  }
  for (std::thread& t : pool) t.join();
}

// Regime materialized for one trial: everything the estimators consume.
struct TrialInstance {
  Graph graph;
  InteractionMatrix a;
  ObservedSet observed;
  CovarianceSpec sigma;
  Eigen::MatrixXi truth;  // observed-local
};

TrialInstance materialize(const ExperimentConfig& cfg, double beta,
                          std::uint64_t trial_seed,
                          std::uint64_t covariance_seed,
                          const Graph* fixed_graph) {
  TrialInstance inst;
  if (fixed_graph != nullptr)
    inst.graph = *fixed_graph;
  else
    inst.graph = erdos_renyi(cfg.n_nodes, cfg.p, cfg.directed,
                             derive_seed(trial_seed,
                                         {purpose_id(SeedPurpose::kGraph)}));
  inst.a = laplacian_weights(inst.graph, cfg.alpha, cfg.rho);
  const int n = inst.graph.n;
  if (cfg.n_observed == 0 || cfg.n_observed == n)
    inst.observed = full_observed(n);
  else
    inst.observed = sample_observed(
        n, cfg.n_observed,
        derive_seed(trial_seed, {purpose_id(SeedPurpose::kObserved)}));
  inst.sigma = build_covariance(n, cfg.sigma2, beta, cfg.osc, covariance_seed);
  inst.truth = observed_support(inst.graph, inst.observed);
  return inst;
}

// Streams one simulation of the instance into a lag-moment accumulator
// restricted to the observed coordinates.
LagMomentAccumulator accumulate_moments(const ExperimentConfig& cfg,
                                        const TrialInstance& inst,
                                        std::uint64_t sim_seed, int lag) {
  const long long length =
      cfg.length > 0 ? cfg.length : cfg.checkpoints.back() + lag;
  LagMomentAccumulator acc(inst.observed.size(), lag, cfg.checkpoints);
  const std::vector<int>& idx = inst.observed.indices;
  Eigen::VectorXd obs(inst.observed.size());
  simulate_visit(inst.a, inst.sigma, InterventionSpec{cfg.intervention}, length,
                 cfg.burn_in, sim_seed,
                 [&](long long, const Eigen::VectorXd& y) {
                   for (std::size_t i = 0; i < idx.size(); ++i)
                     obs(static_cast<Eigen::Index>(i)) = y(idx[i]);
                   acc.add(obs);
                 });
  return acc;
}

// Best single-threshold accuracy achievable on the given scores with the
// truth in hand; the reference ceiling for every threshold-based method.
double oracle_accuracy(const Eigen::MatrixXd& scores,
                       const Eigen::MatrixXi& truth, bool directed) {
  const int s = static_cast<int>(scores.rows());
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(s) * (s - 1));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (i != j) vals.push_back(scores(i, j));
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<double> taus;
  taus.push_back(vals.front() - 1.0);  // everything connected
  for (std::size_t i = 0; i + 1 < vals.size(); ++i)
    taus.push_back(0.5 * (vals[i] + vals[i + 1]));
  taus.push_back(vals.back() + 1.0);  // nothing connected
  double best = 0.0;
  Eigen::MatrixXi pred(s, s);
  for (double tau : taus) {
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j)
        pred(i, j) = (i != j && scores(i, j) > tau) ? 1 : 0;
    best = std::max(best, accuracy(pred, truth, directed));
  }
  return best;
}

int method_index(const std::string& name) {
  if (name == "granger") return 0;
  if (name == "one_lag") return 1;
  if (name == "nig") return 2;
  if (name == "precision") return 3;
  if (name == "oracle") return 4;
  if (name == "ffnn") return 5;
  throw ConfigError("unknown method '" + name + "'");
}

// Standardized labelled K features of one dataset at one checkpoint.
// Centering removes the dataset-wide drift before scaling.
FeatureSet checkpoint_features(const LagMoments& m, const Eigen::MatrixXi& truth,
                               int d, int m_lag) {
  FeatureSet k = center(concat_k(build_f(m, d, m_lag), build_t(m, m_lag)));
  attach_labels(k, truth);
  return k;
}

double score_cell(const std::string& method, const ExperimentConfig& cfg,
                  const LagMoments& m, const TrialInstance& inst,
                  std::uint64_t trial_seed, int checkpoint_index) {
  const std::uint64_t midx = static_cast<std::uint64_t>(method_index(method));
  const std::uint64_t cidx = static_cast<std::uint64_t>(checkpoint_index);
  if (method == "ffnn") {
    FeatureSet k = standard_scale(
        checkpoint_features(m, inst.truth, cfg.feature_d, cfg.feature_m));
    const FfnnModel model = ffnn_train(
        k, cfg.train,
        derive_seed(trial_seed, {purpose_id(SeedPurpose::kFfnn), cidx}));
    const std::vector<int> labels = ffnn_labels(model, k.x);
    const Eigen::MatrixXi pred =
        support_from_pair_labels(k.pairs, labels, inst.observed.size());
    return accuracy(pred, inst.truth, cfg.directed);
  }
  if (method == "oracle") {
    const EstimateMatrix est = nig(m, inst.observed);
    return oracle_accuracy(est.values, inst.truth, cfg.directed);
  }
  EstimateMatrix est;
  if (method == "granger")
    est = granger(m, inst.observed);
  else if (method == "one_lag")
    est = one_lag(m, inst.observed);
  else if (method == "nig")
    est = nig(m, inst.observed);
  else
    est = precision(m, inst.observed);
  const GraphEstimate ge = classify_scores_gmm(
      affinity_scores(est),
      derive_seed(trial_seed, {purpose_id(SeedPurpose::kGmm), cidx, midx}));
  return accuracy(ge.support, inst.truth, cfg.directed);
}

std::vector<ResultRow> run_trial(const ExperimentConfig& cfg, int trial,
                                 const Graph* fixed_graph) {
  const std::uint64_t trial_seed =
      derive_seed(cfg.seed, {static_cast<std::uint64_t>(trial)});
  std::vector<ResultRow> rows;
  rows.reserve(cfg.checkpoints.size() * cfg.methods.size());
  auto blank_row = [&](long long n, const std::string& method) {
    ResultRow row;
    row.method = method;
    row.regime = cfg.id;
    row.beta = cfg.beta;
    row.n = n;
    row.trial_seed = trial_seed;
    return row;
  };
  try {
    const TrialInstance inst = materialize(
        cfg, cfg.beta, trial_seed,
        derive_seed(trial_seed, {purpose_id(SeedPurpose::kCovariance)}),
        fixed_graph);
    const LagMomentAccumulator acc =
        accumulate_moments(cfg, inst, trial_seed, cfg.max_lag_needed());
    for (std::size_t c = 0; c < cfg.checkpoints.size(); ++c) {
      const LagMoments* m = nullptr;
      std::string snapshot_tag;
      try {
        m = &acc.at(cfg.checkpoints[c]);
      } catch (const std::exception& e) {
        snapshot_tag = error_tag(e);
      }
      for (const std::string& method : cfg.methods) {
        ResultRow row = blank_row(cfg.checkpoints[c], method);
        const Clock::time_point t0 = Clock::now();
        if (m == nullptr) {
          row.status = snapshot_tag;
        } else {
          try {
            row.accuracy = score_cell(method, cfg, *m, inst, trial_seed,
                                      static_cast<int>(c));
            row.status = "ok";
          } catch (const std::exception& e) {
            row.status = error_tag(e);
          }
        }
        row.wall_time = seconds_since(t0);
        rows.push_back(std::move(row));
      }
    }
  } catch (const std::exception& e) {
    // The whole trial failed before any cell could run; tag every cell so
    // the CSV keeps its grid shape.
    const std::string tag = error_tag(e);
    rows.clear();
    for (long long n : cfg.checkpoints)
      for (const std::string& method : cfg.methods) {
        ResultRow row = blank_row(n, method);
        row.status = tag;
        rows.push_back(std::move(row));
      }
  }
  return rows;
}

}  // namespace

std::string error_tag(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
  if (dynamic_cast<const FormatError*>(&e)) return "format_error";
  if (dynamic_cast<const LengthError*>(&e)) return "length_error";
  if (dynamic_cast<const StabilityError*>(&e)) return "stability_error";
  if (dynamic_cast<const ConditioningError*>(&e)) return "conditioning_error";
  if (dynamic_cast<const ConstructionError*>(&e)) return "construction_error";
  if (dynamic_cast<const AssumptionError*>(&e)) return "assumption_error";
  if (dynamic_cast<const DegenerateInputError*>(&e))
    return "degenerate_input_error";
  if (dynamic_cast<const DivergenceError*>(&e)) return "divergence_error";
  if (dynamic_cast<const ParameterError*>(&e)) return "parameter_error";
  if (dynamic_cast<const NumericError*>(&e)) return "numeric_error";
  return "error";
}

BenchResult run_benchmark(const ExperimentConfig& config, int threads,
                          const RowSink& sink) {
  config.validate();
  std::optional<Graph> fixed;
  if (!config.graph_file.empty())
    fixed = load_adjacency(config.graph_file, config.directed);
  const Graph* fixed_ptr = fixed ? &*fixed : nullptr;

  BenchResult res;
  run_ordered<std::vector<ResultRow>>(
      config.trials, threads,
      [&](int trial) { return run_trial(config, trial, fixed_ptr); },
      [&](int, std::vector<ResultRow>& rows) {
        for (ResultRow& row : rows) {
          if (row.status != "ok") res.partial_failure = true;
          if (sink) sink(row);
          res.rows.push_back(std::move(row));
        }
      });
  return res;
}

TrainOutcome train_and_generalize(const ExperimentConfig& train_config,
                                  const std::vector<ExperimentConfig>& test_configs,
                                  int threads) {
  train_config.validate();
  for (const ExperimentConfig& t : test_configs) t.validate();

  const std::uint64_t trial_seed = derive_seed(train_config.seed, {0});
  std::optional<Graph> fixed;
  if (!train_config.graph_file.empty())
    fixed = load_adjacency(train_config.graph_file, train_config.directed);

  std::vector<double> sweep = train_config.beta_sweep;
  if (sweep.empty()) sweep.push_back(train_config.beta);

  TrainOutcome out;

  // Pool centered K features over the beta sweep and all checkpoints of one
  // fixed graph realization. Dataset boundaries are kept for per-dataset
  // training rows.
  struct Dataset {
    double beta = 0.0;
    std::vector<FeatureSet> per_checkpoint;
  };
  const TrialInstance base = materialize(
      train_config, sweep.front(), trial_seed,
      derive_seed(trial_seed, {purpose_id(SeedPurpose::kCovariance), 0}),
      fixed ? &*fixed : nullptr);
  const int train_lag = train_config.feature_m;

  std::vector<Dataset> datasets(sweep.size());
  run_ordered<Dataset>(
      static_cast<int>(sweep.size()), threads,
      [&](int bi) {
        Dataset ds;
        ds.beta = sweep[static_cast<std::size_t>(bi)];
        TrialInstance inst = base;
        inst.sigma = build_covariance(
            inst.graph.n, train_config.sigma2, ds.beta, train_config.osc,
            derive_seed(trial_seed, {purpose_id(SeedPurpose::kCovariance),
                                     static_cast<std::uint64_t>(bi)}));
        const std::uint64_t sim_seed =
            derive_seed(trial_seed, {purpose_id(SeedPurpose::kNoise),
                                     static_cast<std::uint64_t>(bi)});
        const LagMomentAccumulator acc =
            accumulate_moments(train_config, inst, sim_seed, train_lag);
        for (long long n : train_config.checkpoints)
          ds.per_checkpoint.push_back(
              checkpoint_features(acc.at(n), inst.truth, train_config.feature_d,
                                  train_config.feature_m));
        return ds;
      },
      [&](int bi, Dataset& ds) {
        datasets[static_cast<std::size_t>(bi)] = std::move(ds);
      });

  FeatureSet pool;
  for (const Dataset& ds : datasets)
    for (const FeatureSet& fs : ds.per_checkpoint) append_features(pool, fs);
  FeatureSet scaled = standard_scale(pool);
  out.model = ffnn_train(
      scaled, train_config.train,
      derive_seed(train_config.seed, {purpose_id(SeedPurpose::kFfnn)}));

  // Pooled training accuracy plus one row per (beta, checkpoint) slice.
  {
    const std::vector<int> labels = ffnn_labels(out.model, scaled.x);
    long long hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == scaled.labels[i]) ++hits;
    out.training_accuracy =
        static_cast<double>(hits) / static_cast<double>(labels.size());
  }
  for (const Dataset& ds : datasets) {
    for (std::size_t c = 0; c < ds.per_checkpoint.size(); ++c) {
      const FeatureSet& fs = ds.per_checkpoint[c];
      ResultRow row;
      row.method = "ffnn";
      row.regime = train_config.id;
      row.beta = ds.beta;
      row.n = train_config.checkpoints[c];
      row.trial_seed = trial_seed;
      const Clock::time_point t0 = Clock::now();
      try {
        FeatureSet slice = apply_scaling(fs, *scaled.scaling);
        const std::vector<int> labels = ffnn_labels(out.model, slice.x);
        const Eigen::MatrixXi pred = support_from_pair_labels(
            slice.pairs, labels, base.observed.size());
        row.accuracy = accuracy(pred, base.truth, train_config.directed);
        row.status = "ok";
      } catch (const std::exception& e) {
        row.status = error_tag(e);
        out.partial_failure = true;
      }
      row.wall_time = seconds_since(t0);
      out.rows.push_back(std::move(row));
    }
  }

  // Generalization: replay the training scaler on each test regime.
  for (const ExperimentConfig& test : test_configs) {
    const std::uint64_t test_seed = derive_seed(test.seed, {0});
    std::vector<ResultRow> test_rows;
    try {
      std::optional<Graph> test_fixed;
      if (!test.graph_file.empty())
        test_fixed = load_adjacency(test.graph_file, test.directed);
      const TrialInstance inst = materialize(
          test, test.beta, test_seed,
          derive_seed(test_seed, {purpose_id(SeedPurpose::kCovariance)}),
          test_fixed ? &*test_fixed : nullptr);
      const LagMomentAccumulator acc =
          accumulate_moments(test, inst, test_seed, train_lag);
      for (long long n : test.checkpoints) {
        ResultRow row;
        row.method = "ffnn";
        row.regime = test.id;
        row.beta = test.beta;
        row.n = n;
        row.trial_seed = test_seed;
        const Clock::time_point t0 = Clock::now();
        try {
          FeatureSet k = checkpoint_features(acc.at(n), inst.truth,
                                             train_config.feature_d,
                                             train_config.feature_m);
          FeatureSet slice = apply_scaling(k, *scaled.scaling);
          const std::vector<int> labels = ffnn_labels(out.model, slice.x);
          const Eigen::MatrixXi pred = support_from_pair_labels(
              slice.pairs, labels, inst.observed.size());
          row.accuracy = accuracy(pred, inst.truth, test.directed);
          row.status = "ok";
        } catch (const std::exception& e) {
          row.status = error_tag(e);
          out.partial_failure = true;
        }
        row.wall_time = seconds_since(t0);
        test_rows.push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      const std::string tag = error_tag(e);
      test_rows.clear();
      for (long long n : test.checkpoints) {
        ResultRow row;
        row.method = "ffnn";
        row.regime = test.id;
        row.beta = test.beta;
        row.n = n;
        row.trial_seed = test_seed;
        row.status = tag;
        test_rows.push_back(std::move(row));
      }
      out.partial_failure = true;
    }
    for (ResultRow& row : test_rows) out.rows.push_back(std::move(row));
  }
  return out;
}

std::string result_csv_header() {
  return "method,regime,beta,n,trial_seed,accuracy,status";
}

std::string format_result_row(const ResultRow& row) {
  std::ostringstream os;
  os << row.method << ',' << row.regime << ',' << format_double(row.beta) << ','
     << row.n << ',' << row.trial_seed << ','
     << (std::isnan(row.accuracy) ? std::string("nan")
                                  : format_double(row.accuracy))
     << ',' << row.status;
  return os.str();
}

void write_results_csv(const std::string& path,
                       const std::vector<ResultRow>& rows, bool timing_sidecar) {
  std::ofstream f(path);
  if (!f) throw FormatError("write_results_csv: cannot open '" + path + "'");
  f << result_csv_header() << '\n';
  for (const ResultRow& row : rows) {
    f << format_result_row(row) << '\n';
    f.flush();
  }
  if (!timing_sidecar) return;
  const std::string tpath = path + ".timing.csv";
  std::ofstream t(tpath);
  if (!t) throw FormatError("write_results_csv: cannot open '" + tpath + "'");
  t << "method,regime,beta,n,trial_seed,wall_time_s\n";
  char buf[64];
  for (const ResultRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", row.wall_time);
    t << row.method << ',' << row.regime << ',' << format_double(row.beta)
      << ',' << row.n << ',' << row.trial_seed << ',' << buf << '\n';
  }
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("read_results_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line) || line != result_csv_header())
    throw FormatError("read_results_csv: '" + path +
                      "' does not start with the results header");
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) fields.push_back(item);
    if (fields.size() != 7)
      throw FormatError("read_results_csv: line " + std::to_string(lineno) +
                        ": expected 7 fields");
    ResultRow row;
    row.method = fields[0];
    row.regime = fields[1];
    try {
      row.beta = std::stod(fields[2]);
      row.n = std::stoll(fields[3]);
      row.trial_seed = std::stoull(fields[4]);
      row.accuracy = fields[5] == "nan"
                         ? std::numeric_limits<double>::quiet_NaN()
                         : std::stod(fields[5]);
    } catch (const std::exception&) {
      throw FormatError("read_results_csv: line " + std::to_string(lineno) +
                        ": bad numeric field");
    }
    row.status = fields[6];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SummaryRow> summarize_results(const std::vector<ResultRow>& rows) {
  std::vector<SummaryRow> out;
  auto find_group = [&](const ResultRow& r) -> SummaryRow& {
    for (SummaryRow& s : out)
      if (s.method == r.method && s.regime == r.regime && s.beta == r.beta &&
          s.n == r.n)
        return s;
    SummaryRow s;
    s.method = r.method;
    s.regime = r.regime;
    s.beta = r.beta;
    s.n = r.n;
    out.push_back(std::move(s));
    return out.back();
  };
  // Two passes: counts and mean first, then spread.
  for (const ResultRow& r : rows) {
    SummaryRow& s = find_group(r);
    if (r.status == "ok") {
      ++s.count;
      s.mean_accuracy += r.accuracy;
    } else {
      ++s.failures;
    }
  }
  for (SummaryRow& s : out)
    if (s.count > 0) s.mean_accuracy /= s.count;
  for (const ResultRow& r : rows) {
    if (r.status != "ok") continue;
    SummaryRow& s = find_group(r);
    const double d = r.accuracy - s.mean_accuracy;
    s.sd_accuracy += d * d;
  }
  for (SummaryRow& s : out)
    s.sd_accuracy = s.count > 0 ? std::sqrt(s.sd_accuracy / s.count) : 0.0;
  return out;
}

std::string summary_csv_header() {
  return "method,regime,beta,n,count,failures,mean_accuracy,sd_accuracy";
}

std::string format_summary_row(const SummaryRow& row) {
  std::ostringstream os;
  os << row.method << ',' << row.regime << ',' << format_double(row.beta) << ','
     << row.n << ',' << row.count << ',' << row.failures << ','
     << format_double(row.mean_accuracy) << ','
     << format_double(row.sd_accuracy);
  return os.str();
}

}  // namespace netinfer
