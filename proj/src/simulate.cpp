#include "netinfer/simulate.hpp"

#include <cmath>

#include "netinfer/errors.hpp"
#include "netinfer/linalg.hpp"

namespace netinfer {

int default_burn_in(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) return 10;
  // Guard against 1/(1-rho) landing one ulp above an integer (e.g. rho=0.9).
  return 10 * static_cast<int>(std::ceil(1.0 / (1.0 - rho) - 1e-9));
}

void simulate_visit(
    const InteractionMatrix& a, const CovarianceSpec& noise,
    const InterventionSpec& intervention, long long length, int burn_in,
    std::uint64_t seed,
    const std::function<void(long long, const Eigen::VectorXd&)>& visit) {
  if (length < 1) throw ParameterError("simulate: length must be >= 1");
  if (a.n() != noise.dim())
    throw ParameterError("simulate: matrix and covariance dimensions differ");
  if (intervention.variance < 0.0)
    throw ParameterError("simulate: intervention variance must be >= 0");
  const double radius = spectral_radius(a.a);
  if (!(radius < 1.0))
    throw StabilityError("simulate: spectral radius " + std::to_string(radius) +
                         " is not < 1; the recursion diverges");
  if (burn_in < 0) burn_in = default_burn_in(radius);

  NoiseSampler sampler(noise, derive_seed(seed, {purpose_id(SeedPurpose::kNoise)}));
  Rng xi_rng(derive_seed(seed, {purpose_id(SeedPurpose::kIntervention)}));
  const double xi_sd = std::sqrt(intervention.variance);
  const int n = a.n();

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x(n);
  for (long long t = 0; t < burn_in + length; ++t) {
    x = sampler.next();
    if (intervention.variance > 0.0)
      for (int i = 0; i < n; ++i) x(i) += xi_sd * xi_rng.normal();
    y = a.a * y + x;
    if (t >= burn_in) visit(t - burn_in, y);
  }
}

TimeSeries simulate(const InteractionMatrix& a, const CovarianceSpec& noise,
                    const InterventionSpec& intervention, long long length,
                    int burn_in, std::uint64_t seed) {
  TimeSeries ts;
  ts.seed = seed;
  ts.burn_in = burn_in < 0 ? default_burn_in(spectral_radius(a.a)) : burn_in;
  ts.data.resize(length, a.n());
  simulate_visit(a, noise, intervention, length, burn_in, seed,
                 [&](long long t, const Eigen::VectorXd& y) {
                   ts.data.row(t) = y.transpose();
                 });
  return ts;
}

ObservedTimeSeries observe(const TimeSeries& ts, const ObservedSet& s) {
  s.validate();
  if (s.n_total != ts.n_nodes())
    throw ParameterError("observe: observed set does not match series width");
  ObservedTimeSeries out;
  out.observed = s;
  out.data.resize(ts.length(), s.size());
  for (int k = 0; k < s.size(); ++k) out.data.col(k) = ts.data.col(s.indices[k]);
  return out;
}

}  // namespace netinfer
