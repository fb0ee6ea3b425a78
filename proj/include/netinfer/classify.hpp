#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "netinfer/features.hpp"

namespace netinfer {

// Two-component 1-D Gaussian mixture. Component 1 has the larger mean and is
// read as "connected".
struct GmmModel {
  double weight[2] = {0.5, 0.5};
  double mean[2] = {0.0, 0.0};
  double var[2] = {1.0, 1.0};
  double log_likelihood = 0.0;
};

struct GmmResult {
  std::vector<int> labels;  // 1 = assigned to the larger-mean component
  GmmModel model;
};

// EM with 50 seeded quantile-spread restarts, up to 500 iterations each,
// stopping when the log-likelihood change drops below 1e-9. Variances are
// floored at 1e-12 * range^2. Requires >= 4 scores; all-equal input raises
// DegenerateInputError.
GmmResult gmm_fit_predict(const std::vector<double>& scores, std::uint64_t seed);

struct FfnnConfig {
  std::vector<int> hidden = {32, 16};
  double learning_rate = 1e-2;
  double momentum = 0.9;
  int batch = 128;
  int epochs = 300;
  double early_stop_delta = 1e-7;
  int early_stop_window = 10;
  bool class_weights = true;  // inverse-frequency weighting of the BCE terms
};

// Fully connected net: softplus hidden layers, single sigmoid output.
struct FfnnModel {
  std::vector<int> dims;  // input, hidden..., 1
  std::vector<Eigen::MatrixXd> w;
  std::vector<Eigen::VectorXd> b;
  std::uint64_t seed = 0;
  int epochs_run = 0;
  double final_loss = 0.0;
  std::optional<ScalingRecord> scaler;

  long long parameter_count() const;
};

// Minibatch gradient descent with momentum on weighted binary cross-entropy.
// Training rows are first put into a canonical order (so the result does not
// depend on input row order), then shuffled per epoch from the seed. NaN loss
// raises DivergenceError.
FfnnModel ffnn_train(const FeatureSet& train, const FfnnConfig& config,
                     std::uint64_t seed);

Eigen::VectorXd ffnn_logits(const FfnnModel& model, const Eigen::MatrixXd& x);
Eigen::VectorXd ffnn_probabilities(const FfnnModel& model,
                                   const Eigen::MatrixXd& x);
// Probability > 0.5 maps to label 1.
std::vector<int> ffnn_labels(const FfnnModel& model, const Eigen::MatrixXd& x);

// Flattened-parameter access and analytic gradient, used by the
// finite-difference check and the optimizer itself.
std::vector<double> ffnn_parameters(const FfnnModel& model);
void ffnn_set_parameters(FfnnModel& model, const std::vector<double>& params);
struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;
};
LossGradient ffnn_loss_gradient(const FfnnModel& model, const Eigen::MatrixXd& x,
                                const std::vector<int>& labels, double w0,
                                double w1);

// Versioned plain-text model serialization; round-trips bit-exactly.
void save_model(const std::string& path, const FfnnModel& model);
FfnnModel load_model(const std::string& path);

// Binary support estimate over observed-local indices, zero diagonal.
struct GraphEstimate {
  Eigen::MatrixXi support;
  Eigen::MatrixXd scores;
};

// Clusters the off-diagonal affinity scores with the GMM and marks the
// larger-mean cluster as connected.
GraphEstimate classify_scores_gmm(const Eigen::MatrixXd& score_matrix,
                                  std::uint64_t seed);

// Builds a support matrix from per-ordered-pair labels.
Eigen::MatrixXi support_from_pair_labels(
    const std::vector<std::pair<int, int>>& pairs, const std::vector<int>& labels,
    int s);

// Fraction of ordered off-diagonal pairs with matching connectivity. In
// undirected mode a pair is counted correct only when both orientations
// match (truth must be symmetric there).
double accuracy(const Eigen::MatrixXi& predicted, const Eigen::MatrixXi& truth,
                bool directed);

}  // namespace netinfer
