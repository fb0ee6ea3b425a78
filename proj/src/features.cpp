#include "netinfer/features.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "netinfer/errors.hpp"
#include "netinfer/linalg.hpp"

namespace netinfer {

namespace {

std::vector<std::pair<int, int>> ordered_pairs(int s) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(s) * (s - 1));
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (i != j) pairs.emplace_back(i, j);
  return pairs;
}

}  // namespace

void FeatureSet::validate() const {
  if (x.rows() != static_cast<Eigen::Index>(pairs.size()))
    throw ParameterError("FeatureSet: row count does not match pair count");
  if (!labels.empty() && labels.size() != pairs.size())
    throw ParameterError("FeatureSet: label count does not match pair count");
}

FeatureSet build_f(const LagMoments& moments, int d, int m) {
  if (d < 0 || d > 1)
    throw ParameterError("build_f: first lag d must be 0 or 1");
  if (m < 3) throw ParameterError("build_f: last lag m must be >= 3");
  if (moments.max_lag < m)
    throw ParameterError("build_f: moment stack holds lags 0.." +
                         std::to_string(moments.max_lag) + ", need " +
                         std::to_string(m));
  const int s = moments.dim();
  if (s < 2) throw ParameterError("build_f: need at least 2 observed nodes");
  FeatureSet fs;
  fs.pairs = ordered_pairs(s);
  fs.x.resize(fs.pairs.size(), m - d + 1);
  for (std::size_t p = 0; p < fs.pairs.size(); ++p) {
    const auto [i, j] = fs.pairs[p];
    for (int k = d; k <= m; ++k) fs.x(p, k - d) = moments.r(k)(i, j);
  }
  return fs;
}

FeatureSet build_t(const LagMoments& moments, int m) {
  if (m < 0) throw ParameterError("build_t: last lag m must be >= 0");
  if (moments.max_lag < m)
    throw ParameterError("build_t: moment stack holds lags 0.." +
                         std::to_string(moments.max_lag) + ", need " +
                         std::to_string(m));
  const int s = moments.dim();
  if (s < 2) throw ParameterError("build_t: need at least 2 observed nodes");
  FeatureSet fs;
  fs.pairs = ordered_pairs(s);
  fs.x.resize(fs.pairs.size(), m + 1);
  for (int k = 0; k <= m; ++k) {
    Eigen::MatrixXd inv;
    try {
      inv = guarded_inverse(moments.r(k), "lag-" + std::to_string(k) + " moment");
    } catch (const ConditioningError& e) {
      throw ConditioningError("build_t: lag " + std::to_string(k) +
                              " moment block is singular or ill-conditioned: " +
                              e.what());
    }
    for (std::size_t p = 0; p < fs.pairs.size(); ++p)
      fs.x(p, k) = inv(fs.pairs[p].first, fs.pairs[p].second);
  }
  return fs;
}

FeatureSet concat_k(const FeatureSet& f, const FeatureSet& t) {
  f.validate();
  t.validate();
  if (f.pairs != t.pairs)
    throw ParameterError("concat_k: pair lists differ");
  FeatureSet k;
  k.pairs = f.pairs;
  k.x.resize(f.x.rows(), f.x.cols() + t.x.cols());
  k.x << f.x, t.x;
  k.labels = f.labels.empty() ? t.labels : f.labels;
  return k;
}

FeatureSet center(const FeatureSet& fs) {
  fs.validate();
  if (fs.size() == 0) throw ParameterError("center: empty feature set");
  FeatureSet out = fs;
  const Eigen::RowVectorXd centroid = fs.x.colwise().mean();
  out.x.rowwise() -= centroid;
  return out;
}

namespace {

// Shared by fit and replay so both produce bit-identical outputs.
FeatureSet transform_with(const FeatureSet& fs, const ScalingRecord& rec) {
  FeatureSet out;
  out.pairs = fs.pairs;
  out.labels = fs.labels;
  out.scaling = rec;
  out.x.resize(fs.x.rows(), rec.kept.size());
  for (std::size_t c = 0; c < rec.kept.size(); ++c) {
    const int k = rec.kept[c];
    const double sd = std::sqrt(rec.var(k));
    out.x.col(c) = (fs.x.col(k).array() - rec.mean(k)) / sd;
  }
  return out;
}

}  // namespace

FeatureSet standard_scale(const FeatureSet& fs) {
  fs.validate();
  if (fs.size() == 0) throw ParameterError("standard_scale: empty feature set");
  ScalingRecord rec;
  rec.input_dim = fs.dim();
  rec.mean.resize(fs.dim());
  rec.var.resize(fs.dim());
  for (int k = 0; k < fs.dim(); ++k) {
    rec.mean(k) = fs.x.col(k).mean();
    rec.var(k) = (fs.x.col(k).array() - rec.mean(k)).square().mean();
    const double scale = std::max(1.0, std::abs(rec.mean(k)));
    if (rec.var(k) > 0.0 && std::sqrt(rec.var(k)) > 1e-12 * scale) {
      rec.kept.push_back(k);
    } else {
      std::cerr << "warning: standard_scale: dropping zero-variance feature "
                   "coordinate "
                << k << "\n";
    }
  }
  if (rec.kept.empty())
    throw DegenerateInputError("standard_scale: all coordinates are constant");
  return transform_with(fs, rec);
}

FeatureSet apply_scaling(const FeatureSet& fs, const ScalingRecord& record) {
  fs.validate();
  if (fs.dim() != record.input_dim)
    throw ParameterError("apply_scaling: feature dimension " +
                         std::to_string(fs.dim()) + " does not match record (" +
                         std::to_string(record.input_dim) + ")");
  return transform_with(fs, record);
}

void attach_labels(FeatureSet& fs, const Eigen::MatrixXi& truth_support) {
  fs.validate();
  fs.labels.resize(fs.pairs.size());
  for (std::size_t p = 0; p < fs.pairs.size(); ++p) {
    const auto [i, j] = fs.pairs[p];
    if (i >= truth_support.rows() || j >= truth_support.cols())
      throw ParameterError("attach_labels: truth matrix too small");
    fs.labels[p] = truth_support(i, j) != 0 ? 1 : 0;
  }
}

void append_features(FeatureSet& base, const FeatureSet& more) {
  more.validate();
  if (base.size() == 0 && base.dim() == 0) {
    base = more;
    return;
  }
  base.validate();
  if (base.dim() != more.dim())
    throw ParameterError("append_features: dimension mismatch");
  if (base.labels.empty() != more.labels.empty())
    throw ParameterError("append_features: label presence mismatch");
  const Eigen::Index old = base.x.rows();
  base.pairs.insert(base.pairs.end(), more.pairs.begin(), more.pairs.end());
  base.x.conservativeResize(old + more.x.rows(), Eigen::NoChange);
  base.x.bottomRows(more.x.rows()) = more.x;
  base.labels.insert(base.labels.end(), more.labels.begin(), more.labels.end());
}

std::optional<SeparatorResult> find_hard_margin_separator(
    const Eigen::MatrixXd& x, const std::vector<int>& labels, int max_epochs,
    const std::optional<Eigen::VectorXd>& warm_start) {
  const Eigen::Index p = x.rows();
  if (p == 0 || labels.size() != static_cast<std::size_t>(p))
    throw ParameterError("find_hard_margin_separator: bad inputs");
  // Work on unit-scale data so perceptron steps are well conditioned.
  const double scale = std::max(1e-300, x.rowwise().norm().maxCoeff());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(x.cols());
  if (warm_start) {
    if (warm_start->size() != x.cols())
      throw ParameterError("find_hard_margin_separator: warm start dimension");
    w = *warm_start;
    const double nw = w.norm();
    if (nw > 0) w /= nw;
  }
  double b = 0.0;
  for (int epoch = 1; epoch <= max_epochs; ++epoch) {
    bool mistake = false;
    for (Eigen::Index r = 0; r < p; ++r) {
      const double y = labels[r] ? 1.0 : -1.0;
      const Eigen::VectorXd xi = x.row(r).transpose() / scale;
      if (y * (w.dot(xi) + b) <= 0.0) {
        w += y * xi;
        b += y;
        mistake = true;
      }
    }
    if (!mistake) {
      const double nw = w.norm();
      if (nw == 0.0) return std::nullopt;
      double margin = std::numeric_limits<double>::infinity();
      for (Eigen::Index r = 0; r < p; ++r) {
        const double y = labels[r] ? 1.0 : -1.0;
        margin = std::min(
            margin, y * (w.dot(x.row(r).transpose()) / scale + b) / nw);
      }
      SeparatorResult res;
      res.w = w / scale;  // separates the original-scale data
      res.b = b;
      res.margin = margin * scale;  // geometric margin in original units
      res.epochs = epoch;
      return res;
    }
  }
  return std::nullopt;
}

}  // namespace netinfer
