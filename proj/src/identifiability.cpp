#include "netinfer/identifiability.hpp"

#include <cmath>
#include <limits>

#include "netinfer/errors.hpp"
#include "netinfer/linalg.hpp"
#include "netinfer/moments.hpp"

namespace netinfer {

double osc(const Eigen::VectorXd& v) {
  if (v.size() == 0) throw ParameterError("osc: empty vector");
  return v.maxCoeff() - v.minCoeff();
}

double osc_offdiag(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw ParameterError("osc_offdiag: matrix must be square");
  if (m.rows() < 2)
    throw ParameterError("osc_offdiag: needs dimension >= 2 (no off-diagonal entries)");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (i == j) continue;
      lo = std::min(lo, m(i, j));
      hi = std::max(hi, m(i, j));
    }
  return hi - lo;
}

double min_positive_offdiag(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw ParameterError("min_positive_offdiag: matrix must be square");
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i == j || a(i, j) == 0.0) continue;
      if (a(i, j) < 0.0)
        throw AssumptionError("min_positive_offdiag: negative coupling entry");
      best = std::min(best, a(i, j));
    }
  if (!std::isfinite(best))
    throw DegenerateInputError(
        "min_positive_offdiag: coupling matrix has no off-diagonal support");
  return best;
}

FlatnessCheck check_flatness(const ErrorMatrix& err, const Eigen::MatrixXd& a_s) {
  if (err.values.rows() != a_s.rows() || err.values.cols() != a_s.cols())
    throw ParameterError("check_flatness: shape mismatch");
  FlatnessCheck c;
  c.osc_value = osc_offdiag(err.values);
  c.a_plus_min = min_positive_offdiag(a_s);
  c.slack = c.a_plus_min / 2.0 - c.osc_value;
  c.holds = c.slack >= 0.0;
  return c;
}

std::optional<ThresholdResult> find_threshold(
    const Eigen::MatrixXd& estimate_values, const Eigen::MatrixXi& truth_support) {
  if (estimate_values.rows() != estimate_values.cols())
    throw ParameterError("find_threshold: estimate must be square");
  if (truth_support.rows() != estimate_values.rows() ||
      truth_support.cols() != estimate_values.cols())
    throw ParameterError("find_threshold: truth shape mismatch");
  double min_conn = std::numeric_limits<double>::infinity();
  double max_disc = -std::numeric_limits<double>::infinity();
  bool any_conn = false, any_disc = false;
  for (Eigen::Index i = 0; i < estimate_values.rows(); ++i)
    for (Eigen::Index j = 0; j < estimate_values.cols(); ++j) {
      if (i == j) continue;
      if (truth_support(i, j) != 0) {
        min_conn = std::min(min_conn, estimate_values(i, j));
        any_conn = true;
      } else {
        max_disc = std::max(max_disc, estimate_values(i, j));
        any_disc = true;
      }
    }
  if (!any_conn || !any_disc)
    throw DegenerateInputError(
        "find_threshold: need both connected and disconnected pairs");
  if (!(min_conn > max_disc)) return std::nullopt;
  return ThresholdResult{(min_conn + max_disc) / 2.0, min_conn - max_disc};
}

std::optional<ThresholdResult> find_threshold(const EstimateMatrix& est,
                                              const Eigen::MatrixXi& truth_support) {
  return find_threshold(est.values, truth_support);
}

namespace {

double condition_rhs(double a_plus_min, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw DegenerateInputError(
        "separability condition: rho must lie in (0, 1)");
  return a_plus_min * (1.0 - rho * rho) / (2.0 * rho * (rho * rho + 1.0));
}

}  // namespace

SeparabilityReport check_separability(const InteractionMatrix& a,
                                      const CovarianceSpec& sigma) {
  if (a.n() != sigma.dim())
    throw ParameterError("check_separability: dimension mismatch");
  if ((a.a.array() < 0.0).any())
    throw AssumptionError("check_separability: coupling matrix has negative entries");
  if (!(spectral_radius(a.a) < 1.0))
    throw StabilityError("check_separability: spectral radius must be < 1");
  sigma.validate();

  SeparabilityReport rep;
  rep.n = a.n();
  rep.rho = a.rho;
  rep.rho_from_row_sum = a.rho_is_row_sum;
  rep.symmetric =
      (a.a - a.a.transpose()).cwiseAbs().maxCoeff() <=
      1e-12 * std::max(1.0, a.a.cwiseAbs().maxCoeff());
  rep.a_plus_min = min_positive_offdiag(a.a);
  rep.sigma2 = sigma.sigma2;
  rep.sigma2_gap = sigma.sigma2_gap;
  rep.beta = sigma.beta;
  rep.osc_sigma = osc_offdiag(sigma.sigma);
  rep.lhs = rep.osc_sigma / rep.sigma2_gap;
  rep.rhs = condition_rhs(rep.a_plus_min, rep.rho);
  rep.margin = rep.rhs - rep.lhs;
  rep.certified = rep.margin >= 0.0;

  const ErrorMatrix err = nig_limit_error(a.a, sigma);
  const FlatnessCheck fc = check_flatness(err, a.a);
  rep.osc_error = fc.osc_value;
  rep.flatness_holds = fc.holds;
  rep.flatness_slack = fc.slack;

  if (rep.certified) {
    rep.min_intervention = 0.0;
  } else {
    rep.min_intervention = min_intervention_variance(a, sigma);
  }

  const LagMoments lm = limit_moments(a.a, sigma.sigma, 3);
  try {
    rep.threshold = find_threshold(Eigen::MatrixXd(lm.r(1) - lm.r(3)),
                                   support_of(a.a));
  } catch (const DegenerateInputError&) {
    rep.threshold = std::nullopt;
  }
  return rep;
}

double min_intervention_variance(const InteractionMatrix& a,
                                 const CovarianceSpec& sigma) {
  sigma.validate();
  const double rhs = condition_rhs(min_positive_offdiag(a.a), a.rho);
  if (!(rhs > 0.0))
    throw DegenerateInputError(
        "min_intervention_variance: condition right-hand side vanishes");
  const double need = osc_offdiag(sigma.sigma) / rhs - sigma.sigma2_gap;
  if (need <= 0.0) return 0.0;
  return need * (1.0 + 1e-12);
}

}  // namespace netinfer
