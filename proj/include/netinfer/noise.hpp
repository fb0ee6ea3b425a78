#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "netinfer/rng.hpp"

namespace netinfer {

// Noise covariance with constant diagonal sigma2 and every off-diagonal
// entry strictly below it. Stored together with its unique split
//   sigma = sigma2_gap * I + beta * ones + residual,
// where sigma2_gap = sigma2 - max off-diagonal entry and beta is the mean
// off-diagonal entry. The residual keeps whatever the first two terms do not
// explain; its off-diagonal entries average to zero.
struct CovarianceSpec {
  Eigen::MatrixXd sigma;
  double sigma2 = 0.0;
  double sigma2_gap = 0.0;
  double beta = 0.0;
  Eigen::MatrixXd residual;

  int dim() const { return static_cast<int>(sigma.rows()); }
  void validate() const;

  // Decomposes and validates an externally supplied covariance matrix.
  static CovarianceSpec from_matrix(const Eigen::MatrixXd& sigma);
};

struct CovarianceDecomposition {
  double sigma2_gap = 0.0;
  double beta = 0.0;
  Eigen::MatrixXd residual;
};

// Per-node independent extra excitation of the given variance.
struct InterventionSpec {
  double variance = 0.0;
};

// Builds an n x n covariance with diagonal sigma2 and symmetric off-diagonal
// entries beta + u_ij, where the u_ij are uniform on [-osc/2, osc/2] and
// recentred so their mean is exactly zero. Requires sigma2 > beta + osc/2 >= 0.
// Throws ConstructionError if the result is not positive semidefinite.
CovarianceSpec build_covariance(int n, double sigma2, double beta, double osc,
                                std::uint64_t seed);

// Splits a covariance into (sigma2_gap, beta, residual). Requires a symmetric
// matrix with constant diagonal (1e-9 relative) and positive sigma2_gap.
CovarianceDecomposition decompose_covariance(const Eigen::MatrixXd& sigma);

// Streams i.i.d. Gaussian vectors with the given covariance. The symmetric
// eigenfactorization handles semidefinite matrices; draws consume normals in
// coordinate order, so sequences are seed-reproducible.
class NoiseSampler {
 public:
  NoiseSampler(const CovarianceSpec& spec, std::uint64_t seed);
  Eigen::VectorXd next();

 private:
  Eigen::MatrixXd factor_;
  Rng rng_;
};

// length x n matrix whose rows are i.i.d. N(0, sigma) draws.
Eigen::MatrixXd sample_noise(const CovarianceSpec& spec, long long length,
                             std::uint64_t seed);

// Adds N(0, variance * I) to every row. variance == 0 returns the input
// unchanged without consuming randomness.
Eigen::MatrixXd add_intervention(const Eigen::MatrixXd& noise,
                                 const InterventionSpec& spec,
                                 std::uint64_t seed);

// Covariance actually excited when an intervention is active.
CovarianceSpec intervened_covariance(const CovarianceSpec& spec,
                                     const InterventionSpec& intervention);

}  // namespace netinfer
