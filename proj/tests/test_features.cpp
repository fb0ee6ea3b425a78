#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "netinfer/errors.hpp"
#include "netinfer/features.hpp"
#include "netinfer/graph.hpp"
#include "netinfer/moments.hpp"
#include "netinfer/noise.hpp"
#include "oracles.hpp"

using namespace netinfer;

namespace {

Eigen::MatrixXd two_node_a() {
  Eigen::MatrixXd a(2, 2);
  a << 0.2, 0.4, 0.4, 0.2;
  return a;
}

FeatureSet tiny_features() {
  FeatureSet fs;
  fs.pairs = {{0, 1}, {1, 0}, {0, 2}};
  fs.x.resize(3, 2);
  fs.x << 1.0, 5.0, -1.0, 5.0, 3.0, 5.0;
  return fs;
}

}  // namespace

TEST_CASE("raw moment features read the lag stack entrywise") {
  const LagMoments lm =
      limit_moments(two_node_a(), Eigen::MatrixXd::Identity(2, 2), 3);
  const FeatureSet fs = build_f(lm, 1, 3);
  REQUIRE(fs.size() == 2);
  REQUIRE(fs.dim() == 3);
  REQUIRE(fs.pairs[0] == std::make_pair(0, 1));
  REQUIRE(fs.pairs[1] == std::make_pair(1, 0));
  // Coordinates are [R_1]_01, [R_2]_01, [R_3]_01 = 55/96, 25/96, 83/480.
  CHECK(fs.x(0, 0) == doctest::Approx(55.0 / 96.0).epsilon(1e-12));
  CHECK(fs.x(0, 1) == doctest::Approx(25.0 / 96.0).epsilon(1e-12));
  CHECK(fs.x(0, 2) == doctest::Approx(83.0 / 480.0).epsilon(1e-12));
  // Symmetric instance: both orientations carry identical features.
  CHECK(fs.x.row(1) == fs.x.row(0));

  const FeatureSet with_zero = build_f(lm, 0, 3);
  CHECK(with_zero.dim() == 4);
  CHECK(with_zero.x(0, 0) == doctest::Approx(25.0 / 96.0).epsilon(1e-12));

  CHECK_THROWS_AS(build_f(lm, 2, 3), ParameterError);
  CHECK_THROWS_AS(build_f(lm, 0, 2), ParameterError);
  CHECK_THROWS_AS(build_f(lm, 1, 4), ParameterError);  // stack only has lag 3
}

TEST_CASE("zero coupling zeroes every raw feature") {
  const LagMoments lm = limit_moments(Eigen::MatrixXd::Zero(3, 3),
                                      Eigen::MatrixXd::Identity(3, 3), 3);
  const FeatureSet fs = build_f(lm, 1, 3);
  CHECK(oracle::max_abs(fs.x) < 1e-14);
}

TEST_CASE("inverse moment features match direct inversion") {
  const LagMoments lm =
      limit_moments(two_node_a(), Eigen::MatrixXd::Identity(2, 2), 3);
  const FeatureSet ts = build_t(lm, 3);
  REQUIRE(ts.dim() == 4);
  for (int k = 0; k <= 3; ++k) {
    const Eigen::MatrixXd inv = lm.r(k).inverse();
    CHECK(ts.x(0, k) == doctest::Approx(inv(0, 1)).epsilon(1e-9));
    CHECK(ts.x(1, k) == doctest::Approx(inv(1, 0)).epsilon(1e-9));
  }
}

TEST_CASE("inverse features detect singular lag blocks") {
  const LagMoments lm = limit_moments(Eigen::MatrixXd::Zero(2, 2),
                                      Eigen::MatrixXd::Identity(2, 2), 3);
  const FeatureSet ok = build_t(lm, 0);
  CHECK(ok.dim() == 1);
  CHECK(ok.x(0, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

  // R_1 of white noise is the zero matrix; the error names the lag.
  try {
    build_t(lm, 3);
    FAIL("expected ConditioningError");
  } catch (const ConditioningError& e) {
    CHECK(std::string(e.what()).find("lag 1") != std::string::npos);
  }
}

TEST_CASE("concatenation preserves pair order and adds dimensions") {
  const LagMoments lm =
      limit_moments(two_node_a(), Eigen::MatrixXd::Identity(2, 2), 3);
  const FeatureSet f = build_f(lm, 1, 3);
  const FeatureSet t = build_t(lm, 3);
  const FeatureSet k = concat_k(f, t);
  CHECK(k.dim() == 7);
  CHECK(k.pairs == f.pairs);
  CHECK(k.x.leftCols(3) == f.x);
  CHECK(k.x.rightCols(4) == t.x);

  FeatureSet other = f;
  other.pairs[0] = {1, 0};
  other.pairs[1] = {0, 1};
  CHECK_THROWS_AS(concat_k(other, t), ParameterError);

  FeatureSet empty;
  CHECK_THROWS_AS(concat_k(f, empty), ParameterError);
}

TEST_CASE("centering removes the centroid and is idempotent") {
  const FeatureSet fs = tiny_features();
  const FeatureSet c = center(fs);
  const Eigen::RowVectorXd centroid = c.x.colwise().mean();
  CHECK(centroid.cwiseAbs().maxCoeff() < 1e-12);

  const FeatureSet cc = center(c);
  CHECK(oracle::max_abs(cc.x - c.x) < 1e-14);

  FeatureSet single;
  single.pairs = {{0, 1}};
  single.x = Eigen::MatrixXd::Constant(1, 3, 42.0);
  const FeatureSet sc = center(single);
  CHECK(oracle::max_abs(sc.x) == 0.0);
}

TEST_CASE("standardization fits population moments and replays exactly") {
  FeatureSet fs;
  fs.pairs = {{0, 1}, {1, 0}};
  fs.x.resize(2, 3);
  // Coordinate 0 is already standardized; coordinate 1 is {0,1};
  // coordinate 2 is constant and must be dropped.
  fs.x << -1.0, 0.0, 3.0, 1.0, 1.0, 3.0;

  const FeatureSet scaled = standard_scale(fs);
  REQUIRE(scaled.scaling.has_value());
  CHECK(scaled.dim() == 2);
  CHECK(scaled.scaling->kept == std::vector<int>{0, 1});
  CHECK(scaled.scaling->input_dim == 3);

  // {-1, 1} has population mean 0 and variance 1: unchanged.
  CHECK(scaled.x(0, 0) == -1.0);
  CHECK(scaled.x(1, 0) == 1.0);
  // {0, 1}: mean 0.5, population sd 0.5.
  CHECK(scaled.x(0, 1) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(scaled.x(1, 1) == doctest::Approx(1.0).epsilon(1e-10));

  const FeatureSet replay = apply_scaling(fs, *scaled.scaling);
  CHECK(replay.x == scaled.x);

  FeatureSet wrong = fs;
  wrong.x.resize(2, 2);
  wrong.x.setZero();
  CHECK_THROWS_AS(apply_scaling(wrong, *scaled.scaling), ParameterError);
}

TEST_CASE("labels attach from the truth support") {
  FeatureSet fs = tiny_features();
  Eigen::MatrixXi truth(3, 3);
  truth.setZero();
  truth(0, 1) = 1;
  truth(0, 2) = 1;
  attach_labels(fs, truth);
  CHECK(fs.labels == std::vector<int>{1, 0, 1});

  Eigen::MatrixXi small(2, 2);
  small.setZero();
  CHECK_THROWS_AS(attach_labels(fs, small), ParameterError);
}

TEST_CASE("append requires matching shapes and label presence") {
  FeatureSet a = tiny_features();
  FeatureSet b = tiny_features();
  append_features(a, b);
  CHECK(a.size() == 6);
  CHECK(a.x.bottomRows(3) == b.x);

  FeatureSet labeled = tiny_features();
  labeled.labels = {0, 1, 0};
  CHECK_THROWS_AS(append_features(a, labeled), ParameterError);

  FeatureSet narrow = tiny_features();
  narrow.x.resize(3, 1);
  narrow.x.setZero();
  CHECK_THROWS_AS(append_features(a, narrow), ParameterError);
}

TEST_CASE("flat noise shifts features uniformly across pairs") {
  // Adding a flat term to the covariance moves every pair's feature vector
  // by the same offset, so pairwise differences are invariant.
  const Graph g = erdos_renyi(5, 0.5, false, 33);
  const InteractionMatrix a = laplacian_weights(g, 0.3, 0.6);

  const CovarianceSpec s1 = build_covariance(5, 4.0, 0.5, 0.6, 2);
  Eigen::MatrixXd sigma2x =
      s1.sigma + 2.0 * Eigen::MatrixXd::Ones(5, 5);

  const FeatureSet f1 =
      build_f(limit_moments(a.a, s1.sigma, 4), 1, 4);
  const FeatureSet f2 = build_f(limit_moments(a.a, sigma2x, 4), 1, 4);

  for (long long p = 1; p < f1.size(); ++p) {
    const Eigen::VectorXd d1 = (f1.x.row(p) - f1.x.row(0)).transpose();
    const Eigen::VectorXd d2 = (f2.x.row(p) - f2.x.row(0)).transpose();
    CHECK((d1 - d2).cwiseAbs().maxCoeff() < 1e-9);
  }

  // After centering, the two feature sets coincide.
  const FeatureSet c1 = center(f1);
  const FeatureSet c2 = center(f2);
  CHECK(oracle::max_abs(c1.x - c2.x) < 1e-9);
}

TEST_CASE("limit features of a certified instance separate linearly") {
  const Graph g = erdos_renyi(6, 0.5, false, 4);
  REQUIRE(g.edge_count() > 0);
  const InteractionMatrix a = laplacian_weights(g, 0.3, 0.6);
  const CovarianceSpec flat = build_covariance(6, 3.0, 0.8, 0.0, 1);

  FeatureSet fs = center(build_f(limit_moments(a.a, flat.sigma, 4), 1, 4));
  attach_labels(fs, g.adj);

  const auto sep = find_hard_margin_separator(fs.x, fs.labels);
  REQUIRE(sep.has_value());
  CHECK(sep->margin > 0.0);
  for (long long p = 0; p < fs.size(); ++p) {
    const double score = sep->w.dot(fs.x.row(p).transpose()) + sep->b;
    CHECK((score > 0) == (fs.labels[p] == 1));
  }
}

TEST_CASE("separator search gives up on non-separable input") {
  Eigen::MatrixXd x(4, 2);
  x << 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0;
  const std::vector<int> xor_labels = {0, 0, 1, 1};
  CHECK_FALSE(find_hard_margin_separator(x, xor_labels, 2000).has_value());
}

TEST_CASE("separator accepts a helpful warm start") {
  Eigen::MatrixXd x(4, 1);
  x << -2.0, -1.0, 1.0, 2.0;
  const std::vector<int> labels = {0, 0, 1, 1};
  Eigen::VectorXd warm(1);
  warm << 1.0;
  const auto sep = find_hard_margin_separator(x, labels, 20000, warm);
  REQUIRE(sep.has_value());
  CHECK(sep->margin > 0.0);
}
