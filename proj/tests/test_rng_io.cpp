#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "netinfer/errors.hpp"
#include "netinfer/matrix_io.hpp"
#include "netinfer/rng.hpp"

using namespace netinfer;

TEST_CASE("rng is deterministic per seed") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t x = a.next_u64();
    CHECK(x == b.next_u64());
    if (x != c.next_u64()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("uniform01 stays in [0,1) with the right mean") {
  Rng rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // SE of the mean is ~0.0009; 0.01 is a 10-sigma band.
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("uniform(lo, hi) respects bounds") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-3.0, 2.0);
    REQUIRE(u >= -3.0);
    REQUIRE(u < 2.0);
  }
}

TEST_CASE("uniform_below covers the full range without bias artifacts") {
  Rng rng(5);
  std::vector<int> counts(10, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t v = rng.uniform_below(10);
    REQUIRE(v < 10);
    ++counts[static_cast<int>(v)];
  }
  for (int c : counts) {
    // Expected 10000 per bin, sd ~95. Allow 6 sigma.
    CHECK(c > 10000 - 570);
    CHECK(c < 10000 + 570);
  }
}

TEST_CASE("normal draws have unit moments") {
  Rng rng(13);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("derive_seed separates purposes and is order sensitive") {
  const std::uint64_t base = 12345;
  CHECK(derive_seed(base, {1}) != derive_seed(base, {2}));
  CHECK(derive_seed(base, {1, 2}) != derive_seed(base, {2, 1}));
  CHECK(derive_seed(base, {1}) == derive_seed(base, {1}));
  CHECK(derive_seed(base, {1}) != derive_seed(base + 1, {1}));

  // Child streams should look unrelated: identical purpose paths from
  // nearby bases must not produce identical first draws.
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 64; ++s) {
    Rng r(derive_seed(s, {purpose_id(SeedPurpose::kNoise), 0}));
    firsts.insert(r.next_u64());
  }
  CHECK(firsts.size() == 64);
}

TEST_CASE("purpose ids are frozen") {
  CHECK(purpose_id(SeedPurpose::kGraph) == 1);
  CHECK(purpose_id(SeedPurpose::kObserved) == 2);
  CHECK(purpose_id(SeedPurpose::kCovariance) == 3);
  CHECK(purpose_id(SeedPurpose::kNoise) == 4);
  CHECK(purpose_id(SeedPurpose::kIntervention) == 5);
  CHECK(purpose_id(SeedPurpose::kGmm) == 6);
  CHECK(purpose_id(SeedPurpose::kFfnn) == 7);
}

TEST_CASE("matrix text io round-trips doubles exactly") {
  Rng rng(99);
  Eigen::MatrixXd m(3, 5);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rng.normal() * 1e3;
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = -0.1;
  m(2, 2) = 0.0;

  std::stringstream ss;
  write_matrix(ss, m);
  const Eigen::MatrixXd back = read_matrix(ss);
  REQUIRE(back.rows() == m.rows());
  REQUIRE(back.cols() == m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) CHECK(back(i, j) == m(i, j));
}

TEST_CASE("matrix file io works through paths") {
  Eigen::MatrixXd m(2, 2);
  m << 0.2, 0.4, 0.4, 0.2;
  const std::string path = "io_roundtrip_tmp.txt";
  save_matrix(path, m);
  const Eigen::MatrixXd back = load_matrix(path);
  CHECK(back == m);
  std::remove(path.c_str());
}

TEST_CASE("malformed matrix input raises FormatError") {
  {
    std::stringstream ss("2 2\n1 2\n3\n");
    CHECK_THROWS_AS(read_matrix(ss), FormatError);
  }
  {
    std::stringstream ss("nonsense\n");
    CHECK_THROWS_AS(read_matrix(ss), FormatError);
  }
  {
    std::stringstream ss("2 2\n1 2\n3 four\n");
    CHECK_THROWS_AS(read_matrix(ss), FormatError);
  }
  CHECK_THROWS_AS(load_matrix("does_not_exist_anywhere.txt"), FormatError);
}

TEST_CASE("format_double emits shortest round-trip strings") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(std::stod(format_double(1.3020833333333333)) == 1.3020833333333333);
}
