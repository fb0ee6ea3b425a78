#include "netinfer/estimators.hpp"

#include <cmath>
#include <string>

#include "netinfer/errors.hpp"
#include "netinfer/linalg.hpp"

namespace netinfer {

namespace {

void check_moments(const LagMoments& m, const ObservedSet& s, int need_lag,
                   const char* who) {
  s.validate();
  if (m.max_lag < need_lag)
    throw ParameterError(std::string(who) + ": moment stack holds lags 0.." +
                         std::to_string(m.max_lag) + ", need lag " +
                         std::to_string(need_lag));
  if (m.dim() != s.size())
    throw ParameterError(std::string(who) +
                         ": moments are not restricted to the observed set");
}

double constant_row_sum_or_radius(const Eigen::MatrixXd& a, bool* from_row_sum) {
  const Eigen::VectorXd sums = a.rowwise().sum();
  const double smax = sums.maxCoeff(), smin = sums.minCoeff();
  if (smax - smin <= 1e-9 * std::max(1.0, std::abs(smax))) {
    *from_row_sum = true;
    return smax;
  }
  *from_row_sum = false;
  return spectral_radius(a);
}

}  // namespace

Method method_from_name(const std::string& name) {
  if (name == "granger") return Method::kGranger;
  if (name == "one_lag") return Method::kOneLag;
  if (name == "nig") return Method::kNig;
  if (name == "precision") return Method::kPrecision;
  throw ParameterError("unknown estimator '" + name + "'");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kGranger: return "granger";
    case Method::kOneLag: return "one_lag";
    case Method::kNig: return "nig";
    case Method::kPrecision: return "precision";
  }
  throw ParameterError("unknown estimator enum value");
}

EstimateMatrix granger(const LagMoments& m, const ObservedSet& s) {
  check_moments(m, s, 1, "granger");
  return {Method::kGranger,
          m.r(1) * guarded_inverse(m.r(0), "lag-0 moment block"), m.n_samples,
          s};
}

EstimateMatrix one_lag(const LagMoments& m, const ObservedSet& s) {
  check_moments(m, s, 1, "one_lag");
  return {Method::kOneLag, m.r(1), m.n_samples, s};
}

EstimateMatrix nig(const LagMoments& m, const ObservedSet& s) {
  check_moments(m, s, 3, "nig");
  return {Method::kNig, m.r(1) - m.r(3), m.n_samples, s};
}

EstimateMatrix precision(const LagMoments& m, const ObservedSet& s) {
  check_moments(m, s, 0, "precision");
  return {Method::kPrecision,
          guarded_inverse(m.r(0), "lag-0 moment block"), m.n_samples, s};
}

Eigen::MatrixXd affinity_scores(const EstimateMatrix& est) {
  if (est.method == Method::kPrecision) return -est.values;
  return est.values;
}

ErrorMatrix granger_limit_error(const Eigen::MatrixXd& a, const ObservedSet& s,
                                const std::optional<Eigen::MatrixXd>& sigma) {
  if (a.rows() != a.cols())
    throw ParameterError("granger_limit_error: matrix must be square");
  s.validate();
  if (s.n_total != a.rows())
    throw ParameterError("granger_limit_error: observed set does not match A");
  ErrorMatrix err;
  err.provenance = sigma ? ErrorMatrix::Provenance::kGrangerColored
                         : ErrorMatrix::Provenance::kGrangerDiagonal;
  const std::vector<int> comp = s.complement();
  if (comp.empty()) {
    err.values = Eigen::MatrixXd::Zero(s.size(), s.size());
    return err;
  }
  const Eigen::MatrixXd a2 = a * a;
  const Eigen::MatrixXd a_ss_c = submatrix(a, s.indices, comp);
  const Eigen::MatrixXd a2_cs = submatrix(a2, comp, s.indices);
  Eigen::MatrixXd middle;
  if (sigma) {
    const Eigen::MatrixXd r0 = limit_r0(a, *sigma);
    const Eigen::MatrixXd p = guarded_inverse(r0, "stationary covariance");
    middle = guarded_inverse(submatrix(p, comp, comp),
                             "latent block of the inverse stationary covariance");
  } else {
    middle = guarded_inverse(
        Eigen::MatrixXd(Eigen::MatrixXd::Identity(comp.size(), comp.size()) -
                        submatrix(a2, comp, comp)),
        "latent block of I - A^2");
  }
  err.values = a_ss_c * middle * a2_cs;
  return err;
}

ErrorMatrix nig_limit_error(const Eigen::MatrixXd& a,
                            const CovarianceSpec& sigma) {
  if (a.rows() != a.cols())
    throw ParameterError("nig_limit_error: matrix must be square");
  if (a.rows() != sigma.dim())
    throw ParameterError("nig_limit_error: covariance shape mismatch");
  sigma.validate();
  const int n = static_cast<int>(a.rows());
  bool from_row_sum = false;
  const double rho = constant_row_sum_or_radius(a, &from_row_sum);
  (void)from_row_sum;  // flat-part term is exact only in the row-sum case
  if (!(spectral_radius(a) < 1.0))
    throw StabilityError("nig_limit_error: spectral radius must be < 1");
  const Eigen::MatrixXd tail =
      sum_sandwich_series(Eigen::MatrixXd(a * sigma.residual), a, a);
  ErrorMatrix err;
  err.provenance = ErrorMatrix::Provenance::kNigLimit;
  err.values = (sigma.beta * rho * Eigen::MatrixXd::Ones(n, n) +
                (Eigen::MatrixXd::Identity(n, n) - a * a) * tail) /
               sigma.sigma2_gap;
  return err;
}

}  // namespace netinfer
