#include <cmath>
#include <vector>

#include "doctest.h"
#include "netinfer/errors.hpp"
#include "netinfer/moments.hpp"
#include "netinfer/noise.hpp"
#include "netinfer/rng.hpp"
#include "netinfer/simulate.hpp"
#include "oracles.hpp"

using namespace netinfer;

namespace {

const double kR0Diag = 125.0 / 96.0;  // 1.3020833333333333
const double kR0Off = 25.0 / 96.0;    // 0.2604166666666667
const double kR1Diag = 35.0 / 96.0;
const double kR1Off = 55.0 / 96.0;
const double kR2Diag = 29.0 / 96.0;
const double kR2Off = 25.0 / 96.0;
const double kR3Diag = 79.0 / 480.0;
const double kR3Off = 83.0 / 480.0;

Eigen::MatrixXd two_node_a() {
  Eigen::MatrixXd a(2, 2);
  a << 0.2, 0.4, 0.4, 0.2;
  return a;
}

}  // namespace

TEST_CASE("constant series gives rank-one moments at every lag") {
  Eigen::VectorXd v(2);
  v << 1.0, -2.0;
  Eigen::MatrixXd series(10, 2);
  for (int t = 0; t < 10; ++t) series.row(t) = v.transpose();
  const Eigen::MatrixXd vv = v * v.transpose();
  for (int k = 0; k <= 2; ++k) {
    const Eigen::MatrixXd rk = empirical_lag_cov(series, k, 8);
    CHECK(oracle::max_abs(rk - vv) < 1e-12);
  }
}

TEST_CASE("iid samples recover the identity at lag zero") {
  const CovarianceSpec id = build_covariance(3, 1.0, 0.0, 0.0, 1);
  const Eigen::MatrixXd x = sample_noise(id, 100000, 2);
  const Eigen::MatrixXd r0 = empirical_lag_cov(x, 0, 100000);
  for (int i = 0; i < 3; ++i) {
    CHECK(r0(i, i) == doctest::Approx(1.0).epsilon(0.05));
    for (int j = 0; j < 3; ++j) {
      if (i != j) CHECK(std::abs(r0(i, j)) < 0.05);
    }
  }
}

TEST_CASE("single-sample moment is the outer product") {
  Eigen::MatrixXd series(1, 2);
  series << 3.0, 4.0;
  const Eigen::MatrixXd r0 = empirical_lag_cov(series, 0, 1);
  CHECK(r0(0, 0) == 9.0);
  CHECK(r0(0, 1) == 12.0);
  CHECK(r0(1, 1) == 16.0);
}

TEST_CASE("lag covariance needs enough samples") {
  Eigen::MatrixXd series(5, 2);
  series.setZero();
  CHECK_THROWS_AS(empirical_lag_cov(series, 2, 4), LengthError);
  CHECK_THROWS_AS(empirical_lag_cov(series, 0, 6), LengthError);
  CHECK_NOTHROW(empirical_lag_cov(series, 2, 3));
}

TEST_CASE("limit moments solve the stationary equation") {
  // Zero coupling: R_0 is the noise covariance itself.
  const Eigen::MatrixXd sigma = build_covariance(3, 2.0, 0.5, 0.0, 1).sigma;
  const Eigen::MatrixXd r0_zero =
      limit_r0(Eigen::MatrixXd::Zero(3, 3), sigma);
  CHECK(oracle::max_abs(r0_zero - sigma) < 1e-14);

  // Scalar chain: variance 1 / (1 - a^2).
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Constant(1, 1, 0.5);
  const Eigen::MatrixXd r0_scalar =
      limit_r0(a1, Eigen::MatrixXd::Identity(1, 1));
  CHECK(r0_scalar(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));

  // Two-node worked instance against exact rationals.
  const Eigen::MatrixXd a = two_node_a();
  const Eigen::MatrixXd r0 = limit_r0(a, Eigen::MatrixXd::Identity(2, 2));
  CHECK(r0(0, 0) == doctest::Approx(kR0Diag).epsilon(1e-12));
  CHECK(r0(1, 1) == doctest::Approx(kR0Diag).epsilon(1e-12));
  CHECK(r0(0, 1) == doctest::Approx(kR0Off).epsilon(1e-12));

  // Fixed-point residual R = A R A^T + sigma.
  const Eigen::MatrixXd resid =
      r0 - a * r0 * a.transpose() - Eigen::MatrixXd::Identity(2, 2);
  CHECK(oracle::max_abs(resid) < 1e-10);

  CHECK_THROWS_AS(
      limit_r0(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)),
      StabilityError);
}

TEST_CASE("higher lag limits are matrix powers times r0") {
  const Eigen::MatrixXd a = two_node_a();
  const Eigen::MatrixXd r0 = limit_r0(a, Eigen::MatrixXd::Identity(2, 2));
  CHECK(limit_rk(a, r0, 0) == r0);

  const Eigen::MatrixXd r1 = limit_rk(a, r0, 1);
  CHECK(r1(0, 0) == doctest::Approx(kR1Diag).epsilon(1e-12));
  CHECK(r1(0, 1) == doctest::Approx(kR1Off).epsilon(1e-12));
  CHECK(r1(1, 0) == doctest::Approx(kR1Off).epsilon(1e-12));

  const Eigen::MatrixXd r2 = limit_rk(a, r0, 2);
  CHECK(r2(0, 0) == doctest::Approx(kR2Diag).epsilon(1e-12));
  CHECK(r2(0, 1) == doctest::Approx(kR2Off).epsilon(1e-12));

  const Eigen::MatrixXd r3 = limit_rk(a, r0, 3);
  CHECK(r3(0, 0) == doctest::Approx(kR3Diag).epsilon(1e-12));
  CHECK(r3(0, 1) == doctest::Approx(kR3Off).epsilon(1e-12));

  // Scalar AR(1): R_1 = a R_0 = 2/3.
  Eigen::MatrixXd a1 = Eigen::MatrixXd::Constant(1, 1, 0.5);
  const Eigen::MatrixXd r0s = limit_r0(a1, Eigen::MatrixXd::Identity(1, 1));
  CHECK(limit_rk(a1, r0s, 1)(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const LagMoments lm = limit_moments(a, Eigen::MatrixXd::Identity(2, 2), 3);
  CHECK(lm.n_samples == 0);
  CHECK(lm.max_lag == 3);
  CHECK(lm.r(0) == r0);
  CHECK(lm.r(3) == r3);
  CHECK_THROWS_AS(lm.r(4), ParameterError);
}

TEST_CASE("streaming accumulator equals the one-shot computation") {
  const CovarianceSpec id = build_covariance(3, 1.0, 0.2, 0.1, 4);
  InteractionMatrix a;
  a.a = Eigen::MatrixXd::Zero(3, 3);
  a.a(0, 1) = 0.3;
  a.a(1, 2) = 0.3;
  a.a(2, 0) = 0.3;
  a.a.diagonal().setConstant(0.2);
  a.rho = 0.5;
  a.rho_is_row_sum = true;

  const int max_lag = 3;
  const std::vector<long long> checkpoints = {10, 100, 1000};
  const long long need = 1000 + max_lag;
  const TimeSeries ts = simulate(a, id, InterventionSpec{}, need, -1, 8);

  LagMomentAccumulator acc(3, max_lag, checkpoints);
  for (long long t = 0; t < need; ++t) {
    acc.add(ts.data.row(t).transpose());
  }
  CHECK(acc.complete());
  CHECK(acc.samples_fed() == need);

  for (long long n : checkpoints) {
    const LagMoments& m = acc.at(n);
    CHECK(m.n_samples == n);
    for (int k = 0; k <= max_lag; ++k) {
      const Eigen::MatrixXd direct = empirical_lag_cov(ts.data, k, n);
      CHECK(oracle::max_abs(m.r(k) - direct) < 1e-12);
    }
  }
}

TEST_CASE("accumulator rejects bad checkpoint queries") {
  LagMomentAccumulator acc(2, 1, {5, 10});
  CHECK_THROWS_AS(acc.at(7), ParameterError);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(2);
  for (int t = 0; t < 6; ++t) acc.add(v);
  CHECK_NOTHROW(acc.at(5));

  // Lag-1 sum at n = 10 needs the 11th sample; the error says so.
  for (int t = 0; t < 4; ++t) acc.add(v);
  CHECK(!acc.complete());
  CHECK_THROWS_AS(acc.at(10), LengthError);
  acc.add(v);
  CHECK(acc.complete());
  CHECK_NOTHROW(acc.at(10));

  CHECK_THROWS_AS(LagMomentAccumulator(2, 1, {}), ParameterError);
  CHECK_THROWS_AS(LagMomentAccumulator(2, 1, {5, 5}), ParameterError);
  CHECK_THROWS_AS(LagMomentAccumulator(2, 1, {10, 5}), ParameterError);
  CHECK_THROWS_AS(LagMomentAccumulator(2, 1, {0}), ParameterError);
  CHECK_THROWS_AS(LagMomentAccumulator(0, 1, {5}), ParameterError);
  CHECK_THROWS_AS(LagMomentAccumulator(2, -1, {5}), ParameterError);
}

TEST_CASE("empirical moments converge to the limit with sample size") {
  const Eigen::MatrixXd a = two_node_a();
  InteractionMatrix im = InteractionMatrix::from_matrix(a);
  const CovarianceSpec id = build_covariance(2, 1.0, 0.0, 0.0, 1);
  const Eigen::MatrixXd r0 = limit_r0(a, id.sigma);
  const Eigen::MatrixXd r1 = limit_rk(a, r0, 1);

  std::vector<long long> sizes = {1000, 10000, 100000};
  std::vector<double> med_r0, med_r1;
  for (long long n : sizes) {
    std::vector<double> e0, e1;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const TimeSeries ts =
          simulate(im, id, InterventionSpec{}, n + 1, -1, seed);
      e0.push_back(oracle::max_abs(empirical_lag_cov(ts.data, 0, n) - r0));
      e1.push_back(oracle::max_abs(empirical_lag_cov(ts.data, 1, n) - r1));
    }
    med_r0.push_back(oracle::median(e0));
    med_r1.push_back(oracle::median(e1));
  }
  CHECK(med_r0[1] < med_r0[0]);
  CHECK(med_r0[2] < med_r0[1]);
  CHECK(med_r1[1] < med_r1[0]);
  CHECK(med_r1[2] < med_r1[1]);
}

TEST_CASE("limit r0 is symmetric for symmetric couplings") {
  Rng rng(31);
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd b(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) b(i, j) = rng.normal();
    const Eigen::MatrixXd sigma =
        b * b.transpose() + Eigen::MatrixXd::Identity(4, 4);

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < i; ++j) m(i, j) = m(j, i) = 0.1 * rng.uniform01();
    const Eigen::MatrixXd r0 = limit_r0(m, sigma);
    CHECK(oracle::max_abs(r0 - r0.transpose()) < 1e-12);

    // Linearity in the noise covariance.
    const Eigen::MatrixXd sum = limit_r0(m, sigma + sigma);
    CHECK(oracle::max_abs(sum - 2.0 * r0) < 1e-10);
  }
}

TEST_CASE("subselect restricts every lag consistently") {
  const Eigen::MatrixXd a = two_node_a();
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(4, 4);
  big.topLeftCorner(2, 2) = a;
  big(2, 3) = 0.3;
  big(3, 2) = 0.3;
  const LagMoments lm = limit_moments(big, Eigen::MatrixXd::Identity(4, 4), 2);

  ObservedSet s;
  s.n_total = 4;
  s.indices = {1, 3};
  const LagMoments sub = subselect(lm, s);
  CHECK(sub.dim() == 2);
  CHECK(sub.max_lag == 2);
  for (int k = 0; k <= 2; ++k) {
    CHECK(sub.r(k)(0, 0) == lm.r(k)(1, 1));
    CHECK(sub.r(k)(0, 1) == lm.r(k)(1, 3));
    CHECK(sub.r(k)(1, 0) == lm.r(k)(3, 1));
    CHECK(sub.r(k)(1, 1) == lm.r(k)(3, 3));
  }

  ObservedSet bad;
  bad.n_total = 5;
  bad.indices = {0};
  CHECK_THROWS_AS(subselect(lm, bad), ParameterError);
}
