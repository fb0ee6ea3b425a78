#include "netinfer/linalg.hpp"

#include <cmath>
#include <limits>

#include "netinfer/errors.hpp"

namespace netinfer {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m,
                          const std::vector<int>& rows,
                          const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(i, j) = m(rows[i], cols[j]);
  return out;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw ParameterError("spectral_radius: matrix must be square");
  if (m.rows() == 0) return 0.0;
  const Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double condition_number(const Eigen::MatrixXd& m) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

Eigen::MatrixXd guarded_inverse(const Eigen::MatrixXd& m,
                                const std::string& what) {
  if (m.rows() != m.cols())
    throw ParameterError("guarded_inverse: matrix must be square (" + what + ")");
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0 || s(0) / smin >= kConditionLimit)
    throw ConditioningError("guarded_inverse: " + what +
                            " is singular or ill-conditioned (condition "
                            "number exceeds 1e12)");
  return svd.matrixV() * s.cwiseInverse().asDiagonal() *
         svd.matrixU().transpose();
}

Eigen::MatrixXd sum_sandwich_series(const Eigen::MatrixXd& t0,
                                    const Eigen::MatrixXd& left,
                                    const Eigen::MatrixXd& right,
                                    double rel_tol, int max_iter) {
  Eigen::MatrixXd sum = t0;
  Eigen::MatrixXd term = t0;
  for (int i = 0; i < max_iter; ++i) {
    term = left * term * right;
    const double scale = std::max(1e-300, sum.cwiseAbs().maxCoeff());
    if (term.cwiseAbs().maxCoeff() < rel_tol * scale) return sum;
    sum += term;
  }
  throw StabilityError(
      "sum_sandwich_series: no convergence; operator is not a stable "
      "contraction");
}

Eigen::MatrixXi support_of(const Eigen::MatrixXd& m, double tol) {
  Eigen::MatrixXi out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      out(i, j) = std::abs(m(i, j)) > tol ? 1 : 0;
  return out;
}

}  // namespace netinfer
