#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "netinfer/moments.hpp"

namespace netinfer {

// Per-coordinate affine scaling fitted on a training set and replayed on
// test features. Variances use the population (1/N) convention. Coordinates
// with vanishing variance are dropped (kept lists the surviving input
// coordinates in order).
struct ScalingRecord {
  int input_dim = 0;
  Eigen::VectorXd mean;  // over input coordinates
  Eigen::VectorXd var;
  std::vector<int> kept;
};

// Feature vectors keyed by ordered node pairs (i, j), i != j, in row-major
// order over observed-local indices. labels (when present) mark ordered pairs
// with a direct coupling.
struct FeatureSet {
  std::vector<std::pair<int, int>> pairs;
  Eigen::MatrixXd x;  // |pairs| x dim
  std::vector<int> labels;
  std::optional<ScalingRecord> scaling;

  int dim() const { return static_cast<int>(x.cols()); }
  long long size() const { return static_cast<long long>(pairs.size()); }
  void validate() const;
};

// Raw lag-moment features: coordinate t of pair (i,j) is [R_{d+t}]_{ij},
// t = 0..m-d. Requires 0 <= d <= 1 and m >= 3.
FeatureSet build_f(const LagMoments& moments, int d, int m);

// Inverse-moment features: coordinate k is [ (R_k)^{-1} ]_{ij}, k = 0..m.
// A singular lag block raises ConditioningError naming the lag.
FeatureSet build_t(const LagMoments& moments, int m);

// Concatenation [F | T] over identical pair lists.
FeatureSet concat_k(const FeatureSet& f, const FeatureSet& t);

// Subtracts the centroid over pairs from every feature vector.
FeatureSet center(const FeatureSet& fs);

// Fits mean/variance per coordinate and standardizes. Zero-variance
// coordinates are dropped with a warning on stderr.
FeatureSet standard_scale(const FeatureSet& fs);

// Replays a stored scaling on new features of the same input dimension,
// bit-for-bit identical to the fitting transform.
FeatureSet apply_scaling(const FeatureSet& fs, const ScalingRecord& record);

// labels[p] = 1 iff truth(i_p, j_p) != 0. truth is observed-local.
void attach_labels(FeatureSet& fs, const Eigen::MatrixXi& truth_support);

// Appends rows of `more` (same dim, labels required in both or neither).
void append_features(FeatureSet& base, const FeatureSet& more);

// Hard-margin linear separability certificate: perceptron feasibility search
// returning a strictly separating hyperplane and its geometric margin, or
// nullopt when none was found within the epoch budget. `warm_start` seeds the
// search direction (bias starts at 0).
struct SeparatorResult {
  Eigen::VectorXd w;
  double b = 0.0;
  double margin = 0.0;
  int epochs = 0;
};
std::optional<SeparatorResult> find_hard_margin_separator(
    const Eigen::MatrixXd& x, const std::vector<int>& labels,
    int max_epochs = 20000,
    const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

}  // namespace netinfer
