#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "netinfer/moments.hpp"
#include "netinfer/noise.hpp"

namespace netinfer {

enum class Method { kGranger, kOneLag, kNig, kPrecision };

Method method_from_name(const std::string& name);
std::string method_name(Method m);

struct EstimateMatrix {
  Method method = Method::kGranger;
  Eigen::MatrixXd values;  // |S| x |S|, observed-local indexing
  long long n_samples = 0;
  ObservedSet observed;
};

struct ErrorMatrix {
  enum class Provenance { kGrangerDiagonal, kGrangerColored, kNigLimit };
  Eigen::MatrixXd values;
  Provenance provenance = Provenance::kNigLimit;
};

// All estimators consume a moment stack that is already restricted to the
// observed subset (empirical or analytic).

// R_1 R_0^{-1} on the observed block. Condition-guarded.
EstimateMatrix granger(const LagMoments& m, const ObservedSet& s);

// Raw lag-1 moment.
EstimateMatrix one_lag(const LagMoments& m, const ObservedSet& s);

// Lag-difference estimator R_1 - R_3, kept unnormalized; divide by
// sigma2_gap at display time when an absolute scale is wanted.
EstimateMatrix nig(const LagMoments& m, const ObservedSet& s);

// R_0^{-1}. Sign convention: connectivity affinity is the negated
// off-diagonal entry, see affinity_scores.
EstimateMatrix precision(const LagMoments& m, const ObservedSet& s);

// Per-pair affinity scores used for classification: the matrix values for
// granger / one_lag / nig, their negation for precision.
Eigen::MatrixXd affinity_scores(const EstimateMatrix& est);

// Population-limit Granger error on the observed block. Without sigma the
// noise is taken as diagonal, giving
//   A_{SS'} (I - [A^2]_{S'})^{-1} [A^2]_{S'S};
// with a colored sigma the middle factor becomes ([R_0^{-1}]_{S'})^{-1}.
// S = all nodes yields the zero matrix.
ErrorMatrix granger_limit_error(
    const Eigen::MatrixXd& a, const ObservedSet& s,
    const std::optional<Eigen::MatrixXd>& sigma = std::nullopt);

// Population-limit error of the gap-normalized lag-difference estimator:
//   (R_1 - R_3)/sigma2_gap -> A + E with
//   E = (beta rho 11^T + (I - A^2) sum_i A^{i+1} residual A^i) / sigma2_gap.
// rho is the common row sum when rows sum to a constant, else the spectral
// radius (the flat-part term is exact only in the former case).
ErrorMatrix nig_limit_error(const Eigen::MatrixXd& a,
                            const CovarianceSpec& sigma);

}  // namespace netinfer
