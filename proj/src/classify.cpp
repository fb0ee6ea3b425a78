#include "netinfer/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "netinfer/errors.hpp"
#include "netinfer/matrix_io.hpp"
#include "netinfer/rng.hpp"

namespace netinfer {

namespace {

constexpr int kGmmRestarts = 50;
constexpr int kGmmMaxIter = 500;
constexpr double kGmmTol = 1e-9;

double log_gauss(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * M_PI * var) - d * d / (2.0 * var);
}

struct EmOutcome {
  GmmModel model;
  bool ok = false;
};

EmOutcome run_em(const std::vector<double>& x, double m0, double m1, double v0,
                 double var_floor) {
  const std::size_t p = x.size();
  GmmModel g;
  g.weight[0] = g.weight[1] = 0.5;
  g.mean[0] = m0;
  g.mean[1] = m1;
  g.var[0] = g.var[1] = std::max(v0, var_floor);
  double prev = -std::numeric_limits<double>::infinity();
  std::vector<double> resp(p);
  for (int iter = 0; iter < kGmmMaxIter; ++iter) {
    // E step, with the log-likelihood of the current parameters.
    double ll = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      const double l0 = std::log(g.weight[0]) + log_gauss(x[i], g.mean[0], g.var[0]);
      const double l1 = std::log(g.weight[1]) + log_gauss(x[i], g.mean[1], g.var[1]);
      const double m = std::max(l0, l1);
      const double lse = m + std::log(std::exp(l0 - m) + std::exp(l1 - m));
      resp[i] = std::exp(l1 - lse);
      ll += lse;
    }
    g.log_likelihood = ll;
    if (std::abs(ll - prev) < kGmmTol) break;
    prev = ll;
    // M step.
    double n1 = 0.0, s1 = 0.0, n0 = 0.0, s0 = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      n1 += resp[i];
      s1 += resp[i] * x[i];
      n0 += 1.0 - resp[i];
      s0 += (1.0 - resp[i]) * x[i];
    }
    if (n0 <= 0.0 || n1 <= 0.0) return {g, false};  // collapsed component
    g.mean[0] = s0 / n0;
    g.mean[1] = s1 / n1;
    double q0 = 0.0, q1 = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      q0 += (1.0 - resp[i]) * (x[i] - g.mean[0]) * (x[i] - g.mean[0]);
      q1 += resp[i] * (x[i] - g.mean[1]) * (x[i] - g.mean[1]);
    }
    g.var[0] = std::max(q0 / n0, var_floor);
    g.var[1] = std::max(q1 / n1, var_floor);
    g.weight[0] = n0 / static_cast<double>(p);
    g.weight[1] = n1 / static_cast<double>(p);
  }
  return {g, true};
}

}  // namespace

GmmResult gmm_fit_predict(const std::vector<double>& scores, std::uint64_t seed) {
  if (scores.size() < 4)
    throw ParameterError("gmm_fit_predict: need at least 4 scores");
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  const double range = sorted.back() - sorted.front();
  if (range == 0.0)
    throw DegenerateInputError(
        "gmm_fit_predict: all scores identical; only a single cluster exists");
  const double var_floor = 1e-12 * range * range;
  const double mean_all =
      std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
  double var_all = 0.0;
  for (double v : sorted) var_all += (v - mean_all) * (v - mean_all);
  var_all /= sorted.size();

  auto quantile = [&](double q) {
    const double pos = q * (sorted.size() - 1);
    return sorted[static_cast<std::size_t>(pos)];
  };

  Rng rng(seed);
  GmmModel best;
  bool have_best = false;
  for (int r = 0; r < kGmmRestarts; ++r) {
    const double ql = rng.uniform(0.0, 0.45);
    const double qh = rng.uniform(0.55, 1.0);
    double m0 = quantile(ql), m1 = quantile(qh);
    if (m0 == m1) {
      m0 = sorted.front();
      m1 = sorted.back();
    }
    const EmOutcome out = run_em(scores, m0, m1, var_all, var_floor);
    if (!out.ok) continue;
    if (!have_best || out.model.log_likelihood > best.log_likelihood) {
      best = out.model;
      have_best = true;
    }
  }
  if (!have_best)
    throw DegenerateInputError("gmm_fit_predict: every restart collapsed");

  // Component 1 = larger mean.
  if (best.mean[0] > best.mean[1]) {
    std::swap(best.mean[0], best.mean[1]);
    std::swap(best.var[0], best.var[1]);
    std::swap(best.weight[0], best.weight[1]);
  }
  GmmResult res;
  res.model = best;
  res.labels.resize(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double l0 = std::log(best.weight[0]) +
                      log_gauss(scores[i], best.mean[0], best.var[0]);
    const double l1 = std::log(best.weight[1]) +
                      log_gauss(scores[i], best.mean[1], best.var[1]);
    res.labels[i] = l1 > l0 ? 1 : 0;
  }
  return res;
}

namespace {

double softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Forward pass storing pre-activations per layer; layer L output is a logit.
struct Forward {
  std::vector<Eigen::MatrixXd> z;  // pre-activations, layer l: rows = samples
  std::vector<Eigen::MatrixXd> h;  // activations (h[0] = input)
};

Forward forward_pass(const FfnnModel& model, const Eigen::MatrixXd& x) {
  Forward f;
  const std::size_t layers = model.w.size();
  f.h.resize(layers + 1);
  f.z.resize(layers);
  f.h[0] = x;
  for (std::size_t l = 0; l < layers; ++l) {
    f.z[l] = (f.h[l] * model.w[l].transpose()).rowwise() + model.b[l].transpose();
    if (l + 1 < layers)
      f.h[l + 1] = f.z[l].unaryExpr([](double v) { return softplus(v); });
    else
      f.h[l + 1] = f.z[l];  // logits
  }
  return f;
}

void check_model_input(const FfnnModel& model, const Eigen::MatrixXd& x) {
  if (model.dims.empty() || model.w.empty())
    throw ParameterError("ffnn: empty model");
  if (x.cols() != model.dims.front())
    throw ParameterError("ffnn: input has " + std::to_string(x.cols()) +
                         " features, model expects " +
                         std::to_string(model.dims.front()));
}

FfnnModel init_model(int input_dim, const FfnnConfig& config,
                     std::uint64_t seed) {
  FfnnModel model;
  model.seed = seed;
  model.dims.push_back(input_dim);
  for (int h : config.hidden) {
    if (h < 1) throw ParameterError("ffnn_train: hidden width must be >= 1");
    model.dims.push_back(h);
  }
  model.dims.push_back(1);
  Rng rng(derive_seed(seed, {purpose_id(SeedPurpose::kFfnn), 0}));
  for (std::size_t l = 0; l + 1 < model.dims.size(); ++l) {
    const int fan_in = model.dims[l], fan_out = model.dims[l + 1];
    Eigen::MatrixXd w(fan_out, fan_in);
    const double sd = std::sqrt(2.0 / fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) w(i, j) = sd * rng.normal();
    model.w.push_back(std::move(w));
    model.b.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return model;
}

}  // namespace

long long FfnnModel::parameter_count() const {
  long long n = 0;
  for (std::size_t l = 0; l < w.size(); ++l) n += w[l].size() + b[l].size();
  return n;
}

std::vector<double> ffnn_parameters(const FfnnModel& model) {
  std::vector<double> out;
  out.reserve(model.parameter_count());
  for (std::size_t l = 0; l < model.w.size(); ++l) {
    for (Eigen::Index i = 0; i < model.w[l].rows(); ++i)
      for (Eigen::Index j = 0; j < model.w[l].cols(); ++j)
        out.push_back(model.w[l](i, j));
    for (Eigen::Index i = 0; i < model.b[l].size(); ++i)
      out.push_back(model.b[l](i));
  }
  return out;
}

void ffnn_set_parameters(FfnnModel& model, const std::vector<double>& params) {
  if (static_cast<long long>(params.size()) != model.parameter_count())
    throw ParameterError("ffnn_set_parameters: size mismatch");
  std::size_t k = 0;
  for (std::size_t l = 0; l < model.w.size(); ++l) {
    for (Eigen::Index i = 0; i < model.w[l].rows(); ++i)
      for (Eigen::Index j = 0; j < model.w[l].cols(); ++j)
        model.w[l](i, j) = params[k++];
    for (Eigen::Index i = 0; i < model.b[l].size(); ++i)
      model.b[l](i) = params[k++];
  }
}

LossGradient ffnn_loss_gradient(const FfnnModel& model, const Eigen::MatrixXd& x,
                                const std::vector<int>& labels, double w0,
                                double w1) {
  check_model_input(model, x);
  if (labels.size() != static_cast<std::size_t>(x.rows()))
    throw ParameterError("ffnn_loss_gradient: label count mismatch");
  const Eigen::Index batch = x.rows();
  const Forward f = forward_pass(model, x);
  const std::size_t layers = model.w.size();

  LossGradient out;
  // Weighted BCE from logits: y*softplus(-z) + (1-y)*softplus(z), scaled by
  // the class weight; gradient w.r.t. z is weight * (sigmoid(z) - y).
  Eigen::MatrixXd delta(batch, 1);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < batch; ++r) {
    const double z = f.z[layers - 1](r, 0);
    const double y = labels[r] ? 1.0 : 0.0;
    const double w = labels[r] ? w1 : w0;
    loss += w * (y * softplus(-z) + (1.0 - y) * softplus(z));
    delta(r, 0) = w * (sigmoid(z) - y) / static_cast<double>(batch);
  }
  out.loss = loss / static_cast<double>(batch);

  std::vector<Eigen::MatrixXd> gw(layers);
  std::vector<Eigen::VectorXd> gb(layers);
  Eigen::MatrixXd d = delta;
  for (std::size_t l = layers; l-- > 0;) {
    gw[l] = d.transpose() * f.h[l];
    gb[l] = d.colwise().sum().transpose();
    if (l > 0) {
      d = (d * model.w[l]).cwiseProduct(
          f.z[l - 1].unaryExpr([](double v) { return sigmoid(v); }));
    }
  }
  out.grad.reserve(model.parameter_count());
  for (std::size_t l = 0; l < layers; ++l) {
    for (Eigen::Index i = 0; i < gw[l].rows(); ++i)
      for (Eigen::Index j = 0; j < gw[l].cols(); ++j)
        out.grad.push_back(gw[l](i, j));
    for (Eigen::Index i = 0; i < gb[l].size(); ++i) out.grad.push_back(gb[l](i));
  }
  return out;
}

FfnnModel ffnn_train(const FeatureSet& train, const FfnnConfig& config,
                     std::uint64_t seed) {
  train.validate();
  if (train.labels.empty())
    throw ParameterError("ffnn_train: training features carry no labels");
  if (train.size() < 1) throw ParameterError("ffnn_train: empty training set");
  if (config.batch < 1 || config.epochs < 0 || config.learning_rate <= 0.0)
    throw ParameterError("ffnn_train: bad optimizer settings");

  // Canonical order: by pair id, then feature values. Training is then
  // invariant to the caller's row order.
  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (train.pairs[a] != train.pairs[b]) return train.pairs[a] < train.pairs[b];
    for (int k = 0; k < train.dim(); ++k)
      if (train.x(a, k) != train.x(b, k)) return train.x(a, k) < train.x(b, k);
    return train.labels[a] < train.labels[b];
  });
  Eigen::MatrixXd x(train.size(), train.dim());
  std::vector<int> y(train.size());
  for (long long r = 0; r < train.size(); ++r) {
    x.row(r) = train.x.row(order[r]);
    y[r] = train.labels[order[r]];
  }

  double w0 = 1.0, w1 = 1.0;
  if (config.class_weights) {
    const double p1 = std::accumulate(y.begin(), y.end(), 0.0);
    const double p0 = static_cast<double>(y.size()) - p1;
    if (p0 > 0.0 && p1 > 0.0) {
      w1 = y.size() / (2.0 * p1);
      w0 = y.size() / (2.0 * p0);
    }
  }

  FfnnModel model = init_model(train.dim(), config, seed);
  model.scaler = train.scaling;

  std::vector<double> velocity(model.parameter_count(), 0.0);
  std::vector<double> params = ffnn_parameters(model);
  Rng shuffle_rng(derive_seed(seed, {purpose_id(SeedPurpose::kFfnn), 1}));
  std::vector<int> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> loss_curve;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      const std::size_t j = shuffle_rng.uniform_below(i);
      std::swap(idx[i - 1], idx[j]);
    }
    for (std::size_t start = 0; start < idx.size();
         start += static_cast<std::size_t>(config.batch)) {
      const std::size_t stop =
          std::min(idx.size(), start + static_cast<std::size_t>(config.batch));
      Eigen::MatrixXd xb(stop - start, x.cols());
      std::vector<int> yb(stop - start);
      for (std::size_t r = start; r < stop; ++r) {
        xb.row(r - start) = x.row(idx[r]);
        yb[r - start] = y[idx[r]];
      }
      const LossGradient lg = ffnn_loss_gradient(model, xb, yb, w0, w1);
      if (!std::isfinite(lg.loss))
        throw DivergenceError(
            "ffnn_train: loss is not finite; lower the learning rate");
      for (std::size_t k = 0; k < params.size(); ++k) {
        velocity[k] =
            config.momentum * velocity[k] - config.learning_rate * lg.grad[k];
        params[k] += velocity[k];
      }
      ffnn_set_parameters(model, params);
    }
    const LossGradient full = ffnn_loss_gradient(model, x, y, w0, w1);
    if (!std::isfinite(full.loss))
      throw DivergenceError(
          "ffnn_train: loss is not finite; lower the learning rate");
    loss_curve.push_back(full.loss);
    model.epochs_run = epoch + 1;
    model.final_loss = full.loss;
    const int w = config.early_stop_window;
    if (w > 0 && static_cast<int>(loss_curve.size()) > w &&
        std::abs(loss_curve[loss_curve.size() - 1] -
                 loss_curve[loss_curve.size() - 1 - w]) <
            config.early_stop_delta)
      break;
  }
  if (config.epochs == 0) {
    const LossGradient full = ffnn_loss_gradient(model, x, y, w0, w1);
    model.final_loss = full.loss;
  }
  return model;
}

Eigen::VectorXd ffnn_logits(const FfnnModel& model, const Eigen::MatrixXd& x) {
  check_model_input(model, x);
  const Forward f = forward_pass(model, x);
  return f.h.back().col(0);
}

Eigen::VectorXd ffnn_probabilities(const FfnnModel& model,
                                   const Eigen::MatrixXd& x) {
  return ffnn_logits(model, x).unaryExpr([](double z) { return sigmoid(z); });
}

std::vector<int> ffnn_labels(const FfnnModel& model, const Eigen::MatrixXd& x) {
  const Eigen::VectorXd p = ffnn_probabilities(model, x);
  std::vector<int> out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) out[i] = p(i) > 0.5 ? 1 : 0;
  return out;
}

void save_model(const std::string& path, const FfnnModel& model) {
  std::ofstream f(path);
  if (!f) throw FormatError("save_model: cannot open '" + path + "'");
  f << "netinfer-ffnn 1\n";
  f << "seed " << model.seed << "\n";
  f << "epochs_run " << model.epochs_run << "\n";
  f << "final_loss " << format_double(model.final_loss) << "\n";
  f << "dims";
  for (int d : model.dims) f << " " << d;
  f << "\n";
  if (model.scaler) {
    const ScalingRecord& s = *model.scaler;
    f << "scaler " << s.input_dim << " " << s.kept.size() << "\n";
    f << "kept";
    for (int k : s.kept) f << " " << k;
    f << "\n";
    f << "mean";
    for (Eigen::Index i = 0; i < s.mean.size(); ++i)
      f << " " << format_double(s.mean(i));
    f << "\n";
    f << "var";
    for (Eigen::Index i = 0; i < s.var.size(); ++i)
      f << " " << format_double(s.var(i));
    f << "\n";
  } else {
    f << "scaler none\n";
  }
  for (std::size_t l = 0; l < model.w.size(); ++l) {
    f << "layer " << l << " " << model.w[l].rows() << " " << model.w[l].cols()
      << "\n";
    for (Eigen::Index i = 0; i < model.w[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < model.w[l].cols(); ++j) {
        if (j) f << " ";
        f << format_double(model.w[l](i, j));
      }
      f << "\n";
    }
    f << "bias";
    for (Eigen::Index i = 0; i < model.b[l].size(); ++i)
      f << " " << format_double(model.b[l](i));
    f << "\n";
  }
}

FfnnModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("load_model: cannot open '" + path + "'");
  auto expect = [&](const std::string& tag) {
    std::string s;
    if (!(f >> s) || s != tag)
      throw FormatError("load_model: expected '" + tag + "' in '" + path + "'");
  };
  expect("netinfer-ffnn");
  int version = 0;
  f >> version;
  if (version != 1)
    throw FormatError("load_model: unsupported version in '" + path + "'");
  FfnnModel model;
  expect("seed");
  f >> model.seed;
  expect("epochs_run");
  f >> model.epochs_run;
  expect("final_loss");
  f >> model.final_loss;
  expect("dims");
  {
    std::string line;
    std::getline(f, line);
    std::istringstream ls(line);
    int d;
    while (ls >> d) model.dims.push_back(d);
  }
  if (model.dims.size() < 2 || model.dims.back() != 1)
    throw FormatError("load_model: bad dims line");
  std::string tag;
  if (!(f >> tag) || tag != "scaler")
    throw FormatError("load_model: expected 'scaler'");
  std::string first;
  f >> first;
  if (first != "none") {
    ScalingRecord s;
    s.input_dim = std::stoi(first);
    std::size_t kept_count = 0;
    f >> kept_count;
    expect("kept");
    s.kept.resize(kept_count);
    for (auto& k : s.kept) f >> k;
    expect("mean");
    s.mean.resize(s.input_dim);
    for (Eigen::Index i = 0; i < s.mean.size(); ++i) f >> s.mean(i);
    expect("var");
    s.var.resize(s.input_dim);
    for (Eigen::Index i = 0; i < s.var.size(); ++i) f >> s.var(i);
    model.scaler = std::move(s);
  }
  for (std::size_t l = 0; l + 1 < model.dims.size(); ++l) {
    expect("layer");
    std::size_t li = 0;
    Eigen::Index rows = 0, cols = 0;
    f >> li >> rows >> cols;
    if (li != l || rows != model.dims[l + 1] || cols != model.dims[l])
      throw FormatError("load_model: layer header mismatch");
    Eigen::MatrixXd w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        if (!(f >> w(i, j))) throw FormatError("load_model: truncated weights");
    expect("bias");
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i)
      if (!(f >> b(i))) throw FormatError("load_model: truncated bias");
    model.w.push_back(std::move(w));
    model.b.push_back(std::move(b));
  }
  return model;
}

GraphEstimate classify_scores_gmm(const Eigen::MatrixXd& score_matrix,
                                  std::uint64_t seed) {
  if (score_matrix.rows() != score_matrix.cols())
    throw ParameterError("classify_scores_gmm: scores must be square");
  const int s = static_cast<int>(score_matrix.rows());
  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(s) * (s - 1));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (i != j) scores.push_back(score_matrix(i, j));
  const GmmResult gmm = gmm_fit_predict(scores, seed);
  GraphEstimate est;
  est.scores = score_matrix;
  est.support = Eigen::MatrixXi::Zero(s, s);
  std::size_t k = 0;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (i != j) est.support(i, j) = gmm.labels[k++];
  return est;
}

Eigen::MatrixXi support_from_pair_labels(
    const std::vector<std::pair<int, int>>& pairs, const std::vector<int>& labels,
    int s) {
  if (pairs.size() != labels.size())
    throw ParameterError("support_from_pair_labels: size mismatch");
  Eigen::MatrixXi support = Eigen::MatrixXi::Zero(s, s);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    if (i < 0 || j < 0 || i >= s || j >= s || i == j)
      throw ParameterError("support_from_pair_labels: bad pair index");
    support(i, j) = labels[p] ? 1 : 0;
  }
  return support;
}

double accuracy(const Eigen::MatrixXi& predicted, const Eigen::MatrixXi& truth,
                bool directed) {
  if (predicted.rows() != predicted.cols() || truth.rows() != truth.cols() ||
      predicted.rows() != truth.rows())
    throw ParameterError("accuracy: shape mismatch");
  const int s = static_cast<int>(predicted.rows());
  if (s < 2) throw ParameterError("accuracy: need at least 2 nodes");
  long long correct = 0, total = 0;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      if (i == j) continue;
      ++total;
      const bool match_ij = (predicted(i, j) != 0) == (truth(i, j) != 0);
      if (directed) {
        if (match_ij) ++correct;
      } else {
        const bool match_ji = (predicted(j, i) != 0) == (truth(j, i) != 0);
        if (match_ij && match_ji) ++correct;
      }
    }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace netinfer
