#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "citesim/rng.hpp"

using namespace citesim;
using Catch::Approx;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a(), y = b(), z = c();
    REQUIRE(x == y);
    differs |= x != z;
  }
  CHECK(differs);
}

TEST_CASE("mt19937_64 engine matches the standard's 10000th value") {
  Rng r(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = r();
  CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("derived seeds separate tuples") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a)
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed({0, a, b}));
  CHECK(seen.size() == 400);
  CHECK(derive_seed({1, 2}) != derive_seed({2, 1}));
  CHECK(derive_seed({1, 2, 3}) == derive_seed({1, 2, 3}));
}

TEST_CASE("uniform stays in [0, 1) with mean 1/2") {
  Rng r(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == Approx(0.5).margin(4 * std::sqrt(1.0 / 12 / n)));
}

TEST_CASE("index is uniform over a non-power-of-two range") {
  Rng r(2);
  const int k = 7, n = 140000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) ++counts[r.index(k)];
  double chi2 = 0.0;
  const double e = static_cast<double>(n) / k;
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  CHECK(chi2 < 22.46);  // chi-square(6) upper 0.001 quantile
}

TEST_CASE("normal draws have unit variance") {
  Rng r(3);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  CHECK(s / n == Approx(0.0).margin(4.0 / std::sqrt(n)));
  CHECK(s2 / n == Approx(1.0).margin(4.0 * std::sqrt(2.0 / n)));
}

TEST_CASE("skew-normal moments match the closed form") {
  Rng r(4);
  const double loc = 0.6, scale = 0.1, shape = 10.0;
  const double delta = shape / std::sqrt(1 + shape * shape);
  const double mean = loc + scale * delta * std::sqrt(2 / std::numbers::pi);
  const double var = scale * scale * (1 - 2 * delta * delta / std::numbers::pi);
  CHECK(mean == Approx(0.6794).margin(1e-4));
  const int n = 400000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.skew_normal(loc, scale, shape);
    s += x;
    s2 += x * x;
  }
  const double m = s / n;
  CHECK(m == Approx(mean).margin(4 * std::sqrt(var / n)));
  CHECK(s2 / n - m * m == Approx(var).epsilon(0.01));
}

TEST_CASE("skew-normal with shape 0 is symmetric") {
  Rng r(5);
  const int n = 200000;
  int above = 0;
  for (int i = 0; i < n; ++i) above += r.skew_normal(1.0, 2.0, 0.0) > 1.0;
  CHECK(static_cast<double>(above) / n == Approx(0.5).margin(4 * 0.5 / std::sqrt(n)));
}
