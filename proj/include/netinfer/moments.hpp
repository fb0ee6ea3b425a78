#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "netinfer/graph.hpp"
#include "netinfer/linalg.hpp"

namespace netinfer {

// Lag covariance stack R_0 .. R_max_lag. n_samples == 0 marks analytic
// (limit) moments.
struct LagMoments {
  int max_lag = 0;
  long long n_samples = 0;
  std::vector<Eigen::MatrixXd> mats;

  const Eigen::MatrixXd& r(int k) const;
  int dim() const { return mats.empty() ? 0 : static_cast<int>(mats[0].rows()); }
};

// Streaming accumulator for R_k(n) = (1/n) sum_{l=0}^{n-1} y(l+k) y(l)^T,
// k = 0..max_lag, snapshotted at the requested checkpoints. Uses Kahan
// compensated summation per entry so accumulation order effects stay at the
// 1e-12 level even for n >= 1e5. The k-lag sum gains its n-th term when
// sample n-1+k arrives, so feed n_max + max_lag samples to complete all
// snapshots.
class LagMomentAccumulator {
 public:
  LagMomentAccumulator(int dim, int max_lag, std::vector<long long> checkpoints);

  void add(const Eigen::VectorXd& y);
  long long samples_fed() const { return t_; }
  bool complete() const;

  // Snapshot at checkpoint n; throws if n was not registered or not reached.
  const LagMoments& at(long long n) const;

 private:
  int dim_;
  int max_lag_;
  std::vector<long long> checkpoints_;
  std::vector<Eigen::VectorXd> ring_;
  std::vector<Eigen::MatrixXd> sum_, comp_;
  std::map<long long, LagMoments> snapshots_;
  std::map<long long, int> filled_;
  long long t_ = 0;
};

// One-shot empirical lag covariance over the first n start indices of
// `series` (rows are samples). Requires series length >= n + k.
Eigen::MatrixXd empirical_lag_cov(const Eigen::MatrixXd& series, int k,
                                  long long n);

// Stationary covariance sum_{i>=0} A^i sigma (A^T)^i, i.e. the fixed point of
// R = A R A^T + sigma, by truncated series summation.
Eigen::MatrixXd limit_r0(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma);

// A^k * r0.
Eigen::MatrixXd limit_rk(const Eigen::MatrixXd& a, const Eigen::MatrixXd& r0,
                         int k);

// Analytic moment stack for the stationary process.
LagMoments limit_moments(const Eigen::MatrixXd& a, const Eigen::MatrixXd& sigma,
                         int max_lag);

// Restriction of every lag matrix to the observed subset.
LagMoments subselect(const LagMoments& m, const ObservedSet& s);

}  // namespace netinfer
