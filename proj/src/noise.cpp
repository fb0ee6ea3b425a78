#include "netinfer/noise.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "netinfer/errors.hpp"

namespace netinfer {

namespace {

constexpr double kDiagRelTol = 1e-9;
constexpr double kPsdRelTol = 1e-10;

void require_square_symmetric(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols())
    throw ParameterError("covariance: matrix must be square");
  if (sigma.rows() < 1)
    throw ParameterError("covariance: need dimension >= 1");
  const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > kDiagRelTol * scale)
    throw AssumptionError("covariance: matrix is not symmetric");
}

}  // namespace

void CovarianceSpec::validate() const {
  require_square_symmetric(sigma);
  const int n = dim();
  for (int i = 0; i < n; ++i) {
    if (std::abs(sigma(i, i) - sigma2) > 1e-12 * std::max(1.0, std::abs(sigma2)))
      throw AssumptionError("covariance: diagonal is not constant");
  }
  if (!(sigma2_gap > 0.0))
    throw AssumptionError(
        "covariance: no dominance gap; some off-diagonal entry reaches the "
        "diagonal");
  // Reconstruction must be exact: the split is defined by subtraction.
  Eigen::MatrixXd rebuilt =
      sigma2_gap * Eigen::MatrixXd::Identity(n, n) +
      beta * Eigen::MatrixXd::Ones(n, n) + residual;
  if ((rebuilt - sigma).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
    throw AssumptionError("covariance: decomposition does not reconstruct");
}

CovarianceDecomposition decompose_covariance(const Eigen::MatrixXd& sigma) {
  require_square_symmetric(sigma);
  const int n = static_cast<int>(sigma.rows());
  const double sigma2 = sigma(0, 0);
  for (int i = 1; i < n; ++i) {
    if (std::abs(sigma(i, i) - sigma2) >
        kDiagRelTol * std::max(1.0, std::abs(sigma2)))
      throw AssumptionError(
          "covariance: diagonal entries differ beyond 1e-9 relative; nodewise "
          "homogeneity does not hold");
  }
  // A 1x1 covariance has no off-diagonal part: gap = sigma2, beta = 0.
  double max_off = 0.0;
  double sum_off = 0.0;
  if (n > 1) {
    max_off = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        max_off = std::max(max_off, sigma(i, j));
        sum_off += sigma(i, j);
      }
  }
  CovarianceDecomposition d;
  d.sigma2_gap = sigma2 - max_off;
  if (!(d.sigma2_gap > 0.0))
    throw AssumptionError(
        "covariance: max off-diagonal entry reaches the diagonal; dominance "
        "gap must be positive");
  d.beta = n > 1 ? sum_off / (static_cast<double>(n) * (n - 1)) : 0.0;
  d.residual = sigma - d.sigma2_gap * Eigen::MatrixXd::Identity(n, n) -
               d.beta * Eigen::MatrixXd::Ones(n, n);
  return d;
}

CovarianceSpec CovarianceSpec::from_matrix(const Eigen::MatrixXd& sigma) {
  const CovarianceDecomposition d = decompose_covariance(sigma);
  CovarianceSpec spec;
  spec.sigma = sigma;
  spec.sigma2 = sigma(0, 0);
  spec.sigma2_gap = d.sigma2_gap;
  spec.beta = d.beta;
  spec.residual = d.residual;
  return spec;
}

CovarianceSpec build_covariance(int n, double sigma2, double beta, double osc,
                                std::uint64_t seed) {
  if (n < 2) throw ParameterError("build_covariance: need n >= 2");
  if (osc < 0.0) throw ParameterError("build_covariance: osc must be >= 0");
  if (!(beta + osc / 2.0 >= 0.0))
    throw ParameterError("build_covariance: need beta + osc/2 >= 0");
  if (!(sigma2 > beta + osc / 2.0))
    throw ParameterError("build_covariance: need sigma2 > beta + osc/2");
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(n, n, beta);
  sigma.diagonal().setConstant(sigma2);
  if (osc > 0.0) {
    Rng rng(seed);
    const int pairs = n * (n - 1) / 2;
    std::vector<double> u(pairs);
    double mean = 0.0;
    for (int k = 0; k < pairs; ++k) {
      u[k] = osc * (rng.uniform01() - 0.5);
      mean += u[k];
    }
    mean /= pairs;
    int k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++k) {
        const double v = beta + (u[k] - mean);
        sigma(i, j) = v;
        sigma(j, i) = v;
      }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      sigma, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdRelTol * sigma2)
    throw ConstructionError(
        "build_covariance: result is not positive semidefinite; reduce osc or "
        "beta");
  CovarianceSpec spec = CovarianceSpec::from_matrix(sigma);
  if (!(spec.sigma2_gap > 0.0))
    throw ConstructionError(
        "build_covariance: recentring pushed an off-diagonal entry up to the "
        "diagonal; reduce osc or beta");
  return spec;
}

NoiseSampler::NoiseSampler(const CovarianceSpec& spec, std::uint64_t seed)
    : rng_(seed) {
  spec.validate();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.sigma);
  const Eigen::VectorXd ev = es.eigenvalues();
  if (ev.minCoeff() < -kPsdRelTol * spec.sigma2)
    throw ConstructionError(
        "NoiseSampler: covariance is not positive semidefinite");
  factor_ = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Eigen::VectorXd NoiseSampler::next() {
  Eigen::VectorXd z(factor_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng_.normal();
  return factor_ * z;
}

Eigen::MatrixXd sample_noise(const CovarianceSpec& spec, long long length,
                             std::uint64_t seed) {
  if (length < 0) throw ParameterError("sample_noise: length must be >= 0");
  NoiseSampler sampler(spec, seed);
  Eigen::MatrixXd out(length, spec.dim());
  for (long long t = 0; t < length; ++t) out.row(t) = sampler.next().transpose();
  return out;
}

Eigen::MatrixXd add_intervention(const Eigen::MatrixXd& noise,
                                 const InterventionSpec& spec,
                                 std::uint64_t seed) {
  if (spec.variance < 0.0)
    throw ParameterError("add_intervention: variance must be >= 0");
  if (spec.variance == 0.0) return noise;
  const double sd = std::sqrt(spec.variance);
  Rng rng(seed);
  Eigen::MatrixXd out = noise;
  for (Eigen::Index t = 0; t < out.rows(); ++t)
    for (Eigen::Index i = 0; i < out.cols(); ++i) out(t, i) += sd * rng.normal();
  return out;
}

CovarianceSpec intervened_covariance(const CovarianceSpec& spec,
                                     const InterventionSpec& intervention) {
  if (intervention.variance < 0.0)
    throw ParameterError("intervened_covariance: variance must be >= 0");
  if (intervention.variance == 0.0) return spec;
  Eigen::MatrixXd sigma = spec.sigma;
  sigma.diagonal().array() += intervention.variance;
  return CovarianceSpec::from_matrix(sigma);
}

}  // namespace netinfer
