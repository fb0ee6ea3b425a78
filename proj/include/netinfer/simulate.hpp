#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "netinfer/graph.hpp"
#include "netinfer/noise.hpp"

namespace netinfer {

// State trajectory of y(t+1) = A y(t) + x(t+1). Row t holds y(t)^T for the
// retained (post burn-in) samples.
struct TimeSeries {
  Eigen::MatrixXd data;
  std::uint64_t seed = 0;
  int burn_in = 0;

  long long length() const { return data.rows(); }
  int n_nodes() const { return static_cast<int>(data.cols()); }
};

struct ObservedTimeSeries {
  Eigen::MatrixXd data;
  ObservedSet observed;

  long long length() const { return data.rows(); }
  int n_nodes() const { return static_cast<int>(data.cols()); }
};

// Default transient discard: ten mixing times at decay rate rho.
int default_burn_in(double rho);

// Runs the recursion from y(0) = 0, discards `burn_in` steps (pass -1 for the
// default), and hands each retained state to `visit` in order. Noise and
// intervention streams are derived from `seed` with fixed purpose tags.
// Throws StabilityError when the spectral radius of A is >= 1.
void simulate_visit(
    const InteractionMatrix& a, const CovarianceSpec& noise,
    const InterventionSpec& intervention, long long length, int burn_in,
    std::uint64_t seed,
    const std::function<void(long long, const Eigen::VectorXd&)>& visit);

TimeSeries simulate(const InteractionMatrix& a, const CovarianceSpec& noise,
                    const InterventionSpec& intervention, long long length,
                    int burn_in, std::uint64_t seed);

// Column projection onto the observed subset.
ObservedTimeSeries observe(const TimeSeries& ts, const ObservedSet& s);

}  // namespace netinfer
