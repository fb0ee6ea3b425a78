#include "netinfer/moments.hpp"

#include <algorithm>
#include <string>

#include "netinfer/errors.hpp"

namespace netinfer {

namespace {

// Kahan update: sum += term with per-entry compensation.
inline void compensated_add(Eigen::MatrixXd& sum, Eigen::MatrixXd& comp,
                            const Eigen::MatrixXd& term) {
  const Eigen::MatrixXd y = term - comp;
  const Eigen::MatrixXd t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

}  // namespace

const Eigen::MatrixXd& LagMoments::r(int k) const {
  if (k < 0 || k > max_lag)
    throw ParameterError("LagMoments: lag " + std::to_string(k) +
                         " outside stored range 0.." + std::to_string(max_lag));
  return mats[k];
}

LagMomentAccumulator::LagMomentAccumulator(int dim, int max_lag,
                                           std::vector<long long> checkpoints)
    : dim_(dim), max_lag_(max_lag), checkpoints_(std::move(checkpoints)) {
  if (dim_ < 1) throw ParameterError("LagMomentAccumulator: dim must be >= 1");
  if (max_lag_ < 0)
    throw ParameterError("LagMomentAccumulator: max_lag must be >= 0");
  if (checkpoints_.empty())
    throw ParameterError("LagMomentAccumulator: no checkpoints");
  for (std::size_t i = 0; i < checkpoints_.size(); ++i) {
    if (checkpoints_[i] < 1)
      throw ParameterError("LagMomentAccumulator: checkpoints must be >= 1");
    if (i > 0 && checkpoints_[i] <= checkpoints_[i - 1])
      throw ParameterError(
          "LagMomentAccumulator: checkpoints must be strictly increasing");
  }
  ring_.resize(max_lag_ + 1, Eigen::VectorXd::Zero(dim_));
  sum_.resize(max_lag_ + 1, Eigen::MatrixXd::Zero(dim_, dim_));
  comp_.resize(max_lag_ + 1, Eigen::MatrixXd::Zero(dim_, dim_));
  for (long long n : checkpoints_) {
    LagMoments m;
    m.max_lag = max_lag_;
    m.n_samples = n;
    m.mats.resize(max_lag_ + 1);
    snapshots_[n] = std::move(m);
    filled_[n] = 0;
  }
}

void LagMomentAccumulator::add(const Eigen::VectorXd& y) {
  if (y.size() != dim_)
    throw ParameterError("LagMomentAccumulator: sample dimension mismatch");
  const int slots = max_lag_ + 1;
  ring_[t_ % slots] = y;
  const int kmax = static_cast<int>(std::min<long long>(t_, max_lag_));
  for (int k = 0; k <= kmax; ++k) {
    const Eigen::VectorXd& past = ring_[(t_ - k) % slots];
    compensated_add(sum_[k], comp_[k], y * past.transpose());
    const long long count = t_ - k + 1;  // terms accumulated for lag k
    auto it = snapshots_.find(count);
    if (it != snapshots_.end()) {
      it->second.mats[k] = sum_[k] / static_cast<double>(count);
      ++filled_[count];
    }
  }
  ++t_;
}

bool LagMomentAccumulator::complete() const {
  for (const auto& [n, cnt] : filled_)
    if (cnt != max_lag_ + 1) return false;
  return true;
}

const LagMoments& LagMomentAccumulator::at(long long n) const {
  auto it = snapshots_.find(n);
  if (it == snapshots_.end())
    throw ParameterError("LagMomentAccumulator: " + std::to_string(n) +
                         " is not a registered checkpoint");
  if (filled_.at(n) != max_lag_ + 1)
    throw LengthError("LagMomentAccumulator: checkpoint " + std::to_string(n) +
                      " needs " + std::to_string(n + max_lag_) +
                      " samples, got " + std::to_string(t_));
  return it->second;
}

Eigen::MatrixXd empirical_lag_cov(const Eigen::MatrixXd& series, int k,
                                  long long n) {
  if (k < 0) throw ParameterError("empirical_lag_cov: lag must be >= 0");
  if (n < 1) throw ParameterError("empirical_lag_cov: need n >= 1");
  if (series.rows() < n + k)
    throw LengthError("empirical_lag_cov: series has " +
                      std::to_string(series.rows()) + " samples, need " +
                      std::to_string(n + k));
  const int dim = static_cast<int>(series.cols());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(dim, dim);
  for (long long l = 0; l < n; ++l)
    compensated_add(sum, comp,
                    series.row(l + k).transpose() * series.row(l));
  return sum / static_cast<double>(n);
}

Eigen::MatrixXd limit_r0(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma) {
  if (a.rows() != a.cols())
    throw ParameterError("limit_r0: matrix must be square");
  if (sigma.rows() != a.rows() || sigma.cols() != a.cols())
    throw ParameterError("limit_r0: covariance shape mismatch");
  return sum_sandwich_series(sigma, a, a.transpose());
}

Eigen::MatrixXd limit_rk(const Eigen::MatrixXd& a, const Eigen::MatrixXd& r0,
                         int k) {
  if (k < 0) throw ParameterError("limit_rk: lag must be >= 0");
  Eigen::MatrixXd out = r0;
  for (int i = 0; i < k; ++i) out = a * out;
  return out;
}

LagMoments limit_moments(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma,
                         int max_lag) {
  if (max_lag < 0) throw ParameterError("limit_moments: max_lag must be >= 0");
  LagMoments m;
  m.max_lag = max_lag;
  m.n_samples = 0;
  m.mats.resize(max_lag + 1);
  m.mats[0] = limit_r0(a, sigma);
  for (int k = 1; k <= max_lag; ++k) m.mats[k] = a * m.mats[k - 1];
  return m;
}

LagMoments subselect(const LagMoments& m, const ObservedSet& s) {
  s.validate();
  if (s.n_total != m.dim())
    throw ParameterError("subselect: observed set does not match moment dim");
  LagMoments out;
  out.max_lag = m.max_lag;
  out.n_samples = m.n_samples;
  out.mats.reserve(m.mats.size());
  for (const auto& mat : m.mats)
    out.mats.push_back(submatrix(mat, s.indices, s.indices));
  return out;
}

}  // namespace netinfer
