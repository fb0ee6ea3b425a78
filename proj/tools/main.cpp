// netinfer command line: regime generation, simulation, estimation, feature
// dumps, training, benchmarking, identifiability audits, and result tables.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical or
// assumption failure, 4 run completed with tagged (failed) rows.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "netinfer/bench.hpp"
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

namespace {

using namespace netinfer;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
};

ExperimentConfig load_common_config(const CommonArgs& args) {
  if (args.config_path.empty())
    throw ConfigError("missing --config PATH");
  ExperimentConfig cfg = load_config(args.config_path);
  if (args.seed) {
    cfg.seed = *args.seed;
    cfg.validate();
  }
  return cfg;
}

// Trial-0 realization of the configured regime, matching what `bench` uses
// for its first trial.
struct Realization {
  Graph graph;
  InteractionMatrix a;
  ObservedSet observed;
  CovarianceSpec sigma;
  Eigen::MatrixXi truth;
  std::uint64_t trial_seed = 0;
};

Realization realize(const ExperimentConfig& cfg) {
  Realization r;
  r.trial_seed = derive_seed(cfg.seed, {0});
  if (!cfg.graph_file.empty())
    r.graph = load_adjacency(cfg.graph_file, cfg.directed);
  else
    r.graph = erdos_renyi(
        cfg.n_nodes, cfg.p, cfg.directed,
        derive_seed(r.trial_seed, {purpose_id(SeedPurpose::kGraph)}));
  r.a = laplacian_weights(r.graph, cfg.alpha, cfg.rho);
  if (cfg.n_observed == 0 || cfg.n_observed == r.graph.n)
    r.observed = full_observed(r.graph.n);
  else
    r.observed = sample_observed(
        r.graph.n, cfg.n_observed,
        derive_seed(r.trial_seed, {purpose_id(SeedPurpose::kObserved)}));
  r.sigma = build_covariance(
      r.graph.n, cfg.sigma2, cfg.beta, cfg.osc,
      derive_seed(r.trial_seed, {purpose_id(SeedPurpose::kCovariance)}));
  r.truth = observed_support(r.graph, r.observed);
  return r;
}

LagMomentAccumulator accumulate(const ExperimentConfig& cfg,
                                const Realization& r, int lag) {
  const long long length =
      cfg.length > 0 ? cfg.length : cfg.checkpoints.back() + lag;
  LagMomentAccumulator acc(r.observed.size(), lag, cfg.checkpoints);
  Eigen::VectorXd obs(r.observed.size());
  simulate_visit(r.a, r.sigma, InterventionSpec{cfg.intervention}, length,
                 cfg.burn_in, r.trial_seed,
                 [&](long long, const Eigen::VectorXd& y) {
                   for (std::size_t i = 0; i < r.observed.indices.size(); ++i)
                     obs(static_cast<Eigen::Index>(i)) =
                         y(r.observed.indices[i]);
                   acc.add(obs);
                 });
  return acc;
}

int cmd_generate(const CommonArgs& args) {
  const ExperimentConfig cfg = load_common_config(args);
  const Realization r = realize(cfg);
  const std::string prefix = args.out.empty() ? cfg.id : args.out;
  save_matrix(prefix + ".adjacency.txt", r.graph.adj.cast<double>());
  save_matrix(prefix + ".weights.txt", r.a.a);
  save_matrix(prefix + ".covariance.txt", r.sigma.sigma);
  Eigen::MatrixXd obs(1, r.observed.size());
  for (int i = 0; i < r.observed.size(); ++i) obs(0, i) = r.observed.indices[i];
  save_matrix(prefix + ".observed.txt", obs);
  std::cout << "wrote " << prefix << ".{adjacency,weights,covariance,observed}.txt"
            << " (n=" << r.graph.n << ", edges=" << r.graph.edge_count()
            << ", observed=" << r.observed.size() << ")\n";
  return 0;
}

int cmd_simulate(const CommonArgs& args) {
  const ExperimentConfig cfg = load_common_config(args);
  const Realization r = realize(cfg);
  const long long length =
      cfg.length > 0 ? cfg.length : cfg.samples_needed();
  const TimeSeries ts = simulate(r.a, r.sigma, InterventionSpec{cfg.intervention},
                                 length, cfg.burn_in, r.trial_seed);
  const ObservedTimeSeries obs = observe(ts, r.observed);
  const std::string path = args.out.empty() ? cfg.id + ".series.txt" : args.out;
  save_matrix(path, obs.data);
  std::cout << "wrote " << path << " (" << obs.data.rows() << " samples x "
            << obs.data.cols() << " observed nodes)\n";
  return 0;
}

int cmd_estimate(const CommonArgs& args) {
  const ExperimentConfig cfg = load_common_config(args);
  const Realization r = realize(cfg);
  const LagMomentAccumulator acc = accumulate(cfg, r, cfg.max_lag_needed());
  const std::string prefix = args.out.empty() ? cfg.id : args.out;
  int written = 0;
  for (long long n : cfg.checkpoints) {
    const LagMoments& m = acc.at(n);
    for (const std::string& name : cfg.methods) {
      if (name == "ffnn" || name == "oracle") continue;  // no matrix output
      EstimateMatrix est;
      if (name == "granger")
        est = granger(m, r.observed);
      else if (name == "one_lag")
        est = one_lag(m, r.observed);
      else if (name == "nig")
        est = nig(m, r.observed);
      else
        est = precision(m, r.observed);
      const std::string path =
          prefix + "." + name + ".n" + std::to_string(n) + ".txt";
      save_matrix(path, est.values);
      ++written;
    }
  }
  std::cout << "wrote " << written << " estimate matrices with prefix '"
            << prefix << ".'\n";
  return 0;
}

int cmd_features(const CommonArgs& args) {
  const ExperimentConfig cfg = load_common_config(args);
  const Realization r = realize(cfg);
  const int lag = std::max(cfg.max_lag_needed(), cfg.feature_m);
  const LagMomentAccumulator acc = accumulate(cfg, r, lag);
  const LagMoments& m = acc.at(cfg.checkpoints.back());
  FeatureSet k = concat_k(build_f(m, cfg.feature_d, cfg.feature_m),
                          build_t(m, cfg.feature_m));
  attach_labels(k, r.truth);
  const std::string path = args.out.empty() ? cfg.id + ".features.csv" : args.out;
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open '" + path + "'");
  f << "i,j,label";
  for (int c = 0; c < k.dim(); ++c) f << ",k_" << c;
  f << "\n";
  for (long long row = 0; row < k.size(); ++row) {
    f << k.pairs[row].first << ',' << k.pairs[row].second << ','
      << k.labels[row];
    for (int c = 0; c < k.dim(); ++c) f << ',' << format_double(k.x(row, c));
    f << "\n";
  }
  std::cout << "wrote " << path << " (" << k.size() << " pairs x " << k.dim()
            << " coordinates)\n";
  return 0;
}

int cmd_train(const CommonArgs& args, const std::vector<std::string>& test_paths) {
  const ExperimentConfig cfg = load_common_config(args);
  std::vector<ExperimentConfig> tests;
  for (const std::string& p : test_paths) tests.push_back(load_config(p));
  const TrainOutcome out = train_and_generalize(cfg, tests, args.threads);
  const std::string model_path = !args.out.empty()        ? args.out
                                 : !cfg.model_path.empty() ? cfg.model_path
                                                           : cfg.id + ".model.txt";
  save_model(model_path, out.model);
  std::cerr << "model: " << model_path << " (" << out.model.parameter_count()
            << " parameters, " << out.model.epochs_run
            << " epochs, final loss " << out.model.final_loss << ")\n";
  std::cerr << "pooled training accuracy: " << out.training_accuracy << "\n";
  std::cout << result_csv_header() << "\n";
  for (const ResultRow& row : out.rows)
    std::cout << format_result_row(row) << "\n";
  if (!cfg.results_path.empty())
    write_results_csv(cfg.results_path, out.rows, cfg.timing_sidecar);
  return out.partial_failure ? 4 : 0;
}

int cmd_bench(const CommonArgs& args) {
  const ExperimentConfig cfg = load_common_config(args);
  const std::string path = !args.out.empty()            ? args.out
                           : !cfg.results_path.empty()  ? cfg.results_path
                                                        : cfg.id + ".results.csv";
  std::ofstream f(path);
  if (!f) throw FormatError("cannot open '" + path + "'");
  f << result_csv_header() << '\n';
  f.flush();
  const BenchResult res = run_benchmark(cfg, args.threads,
                                        [&](const ResultRow& row) {
                                          f << format_result_row(row) << '\n';
                                          f.flush();
                                        });
  f.close();
  if (cfg.timing_sidecar) {
    const std::string tpath = path + ".timing.csv";
    std::ofstream t(tpath);
    if (!t) throw FormatError("cannot open '" + tpath + "'");
    t << "method,regime,beta,n,trial_seed,wall_time_s\n";
    char buf[64];
    for (const ResultRow& row : res.rows) {
      std::snprintf(buf, sizeof(buf), "%.6f", row.wall_time);
      t << row.method << ',' << row.regime << ',' << format_double(row.beta)
        << ',' << row.n << ',' << row.trial_seed << ',' << buf << '\n';
    }
  }
  std::cerr << "wrote " << path << " (" << res.rows.size() << " rows)\n";
  std::cout << summary_csv_header() << "\n";
  for (const SummaryRow& s : summarize_results(res.rows))
    std::cout << format_summary_row(s) << "\n";
  return res.partial_failure ? 4 : 0;
}

void print_audit_text(const SeparabilityReport& rep, std::ostream& os) {
  auto line = [&os](const std::string& name, const std::string& value) {
    os << "  " << name;
    for (std::size_t i = name.size(); i < 22; ++i) os << ' ';
    os << value << "\n";
  };
  os << "identifiability audit\n";
  line("nodes", std::to_string(rep.n));
  line("rho", format_double(rep.rho) +
                   (rep.rho_from_row_sum ? " (constant row sums)"
                                         : " (spectral radius; row sums vary, "
                                           "certificate premise unverified)"));
  line("symmetric", rep.symmetric ? "yes" : "no (flat-part premise unverified)");
  line("a_plus_min", format_double(rep.a_plus_min));
  line("sigma2", format_double(rep.sigma2));
  line("sigma2_gap", format_double(rep.sigma2_gap));
  line("beta", format_double(rep.beta));
  line("osc(off(sigma))", format_double(rep.osc_sigma));
  line("lhs", format_double(rep.lhs));
  line("rhs", format_double(rep.rhs));
  line("margin", format_double(rep.margin));
  line("certified", rep.certified ? "yes" : "no (uncertified, not refuted)");
  line("osc(off(error))", format_double(rep.osc_error));
  line("flatness_holds", rep.flatness_holds ? "yes" : "no");
  line("flatness_slack", format_double(rep.flatness_slack));
  line("min_intervention", format_double(rep.min_intervention));
  if (rep.threshold)
    line("threshold", "tau=" + format_double(rep.threshold->tau) +
                          " gap=" + format_double(rep.threshold->gap));
  else
    line("threshold", "none found");
}

std::string audit_csv_header() {
  return "n,rho,rho_from_row_sum,symmetric,a_plus_min,sigma2,sigma2_gap,beta,"
         "osc_sigma,lhs,rhs,margin,certified,osc_error,flatness_holds,"
         "flatness_slack,min_intervention,tau,gap";
}

std::string audit_csv_row(const SeparabilityReport& rep) {
  std::string row = std::to_string(rep.n) + "," + format_double(rep.rho) + "," +
                    (rep.rho_from_row_sum ? "1" : "0") + "," +
                    (rep.symmetric ? "1" : "0") + "," +
                    format_double(rep.a_plus_min) + "," +
                    format_double(rep.sigma2) + "," +
                    format_double(rep.sigma2_gap) + "," +
                    format_double(rep.beta) + "," +
                    format_double(rep.osc_sigma) + "," + format_double(rep.lhs) +
                    "," + format_double(rep.rhs) + "," +
                    format_double(rep.margin) + "," +
                    (rep.certified ? "1" : "0") + "," +
                    format_double(rep.osc_error) + "," +
                    (rep.flatness_holds ? "1" : "0") + "," +
                    format_double(rep.flatness_slack) + "," +
                    format_double(rep.min_intervention) + ",";
  if (rep.threshold)
    row += format_double(rep.threshold->tau) + "," +
           format_double(rep.threshold->gap);
  else
    row += ",";
  return row;
}

int cmd_audit(const std::string& a_path, const std::string& sigma_path,
              const std::string& out) {
  const InteractionMatrix a = InteractionMatrix::from_matrix(load_matrix(a_path));
  const CovarianceSpec sigma = CovarianceSpec::from_matrix(load_matrix(sigma_path));
  const SeparabilityReport rep = check_separability(a, sigma);
  print_audit_text(rep, std::cout);
  std::cout << audit_csv_header() << "\n" << audit_csv_row(rep) << "\n";
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw FormatError("cannot open '" + out + "'");
    f << audit_csv_header() << "\n" << audit_csv_row(rep) << "\n";
  }
  return 0;
}

int cmd_plotdata(const std::string& results_path, const std::string& out) {
  const std::vector<ResultRow> rows = read_results_csv(results_path);
  const std::vector<SummaryRow> summary = summarize_results(rows);
  std::ostream* os = &std::cout;
  std::ofstream f;
  if (!out.empty()) {
    f.open(out);
    if (!f) throw FormatError("cannot open '" + out + "'");
    os = &f;
  }
  *os << summary_csv_header() << "\n";
  for (const SummaryRow& s : summary) *os << format_summary_row(s) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netinfer: network structure inference from linear dynamics"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub, bool with_threads = false) {
    sub->add_option("--config", args.config_path, "experiment config file");
    sub->add_option("--seed", args.seed, "override the master seed");
    sub->add_option("--out", args.out, "output path or prefix");
    if (with_threads)
      sub->add_option("--threads", args.threads, "worker threads (default 1)");
  };

  CLI::App* generate = app.add_subcommand(
      "generate", "materialize a regime: graph, weights, covariance, observed set");
  add_common(generate);
  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "simulate the regime and write the observed time series");
  add_common(simulate_cmd);
  CLI::App* estimate = app.add_subcommand(
      "estimate", "write per-method estimate matrices at each checkpoint");
  add_common(estimate);
  CLI::App* features = app.add_subcommand(
      "features", "dump per-pair feature vectors at the largest checkpoint");
  add_common(features);

  std::vector<std::string> test_paths;
  CLI::App* train = app.add_subcommand(
      "train", "train the network on pooled features, optionally generalize");
  add_common(train, true);
  train->add_option("tests", test_paths, "test regime config files");

  CLI::App* bench = app.add_subcommand(
      "bench", "run all methods across trials and checkpoints, write CSV");
  add_common(bench, true);

  std::string audit_a, audit_sigma, audit_out;
  CLI::App* audit = app.add_subcommand(
      "audit", "identifiability audit of an interaction matrix + noise covariance");
  audit->add_option("weights", audit_a, "interaction matrix file")->required();
  audit->add_option("covariance", audit_sigma, "noise covariance file")->required();
  audit->add_option("--out", audit_out, "also write the CSV row here");

  std::string plot_in, plot_out;
  CLI::App* plotdata = app.add_subcommand(
      "plotdata", "aggregate a results CSV into mean/sd accuracy per method and n");
  plotdata->add_option("results", plot_in, "results CSV from bench")->required();
  plotdata->add_option("--out", plot_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) return cmd_generate(args);
    if (*simulate_cmd) return cmd_simulate(args);
    if (*estimate) return cmd_estimate(args);
    if (*features) return cmd_features(args);
    if (*train) return cmd_train(args, test_paths);
    if (*bench) return cmd_bench(args);
    if (*audit) return cmd_audit(audit_a, audit_sigma, audit_out);
    if (*plotdata) return cmd_plotdata(plot_in, plot_out);
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
