#include "catch_amalgamated.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "citesim/rng.hpp"
#include "citesim/stats.hpp"
#include "stat_oracles.hpp"

using namespace citesim;
using namespace citesim::stats;
using Catch::Approx;

TEST_CASE("log gamma agrees with the C library") {
  for (double x : {0.1, 0.5, 1.0, 1.5, 2.0, 7.3, 30.0, 128.5, 1000.0})
    CHECK(log_gamma(x) == Approx(std::lgamma(x)).epsilon(1e-13).margin(1e-13));
}

TEST_CASE("incomplete beta edge values and symmetry") {
  CHECK(incomplete_beta(2, 3, 0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1) == 1.0);
  CHECK(incomplete_beta(1, 1, 0.3) == Approx(0.3));
  for (double x : {0.1, 0.4, 0.8}) CHECK(incomplete_beta(2.5, 4, x) == Approx(1 - incomplete_beta(4, 2.5, 1 - x)));
  // I_x(a, 1) = x^a
  CHECK(incomplete_beta(3.5, 1, 0.7) == Approx(std::pow(0.7, 3.5)).epsilon(1e-12));
}

TEST_CASE("one-sample t-test worked example") {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const auto r = one_sample_t_test(v, 0.0);
  CHECK(r.statistic == Approx(3 / std::sqrt(2.5 / 5)).epsilon(1e-12));
  CHECK(r.statistic == Approx(4.2426).margin(1e-4));
  CHECK(r.df == 4);
  CHECK(r.p_value == Approx(0.0132).margin(1e-4));
  CHECK(r.estimate == 3);
}

TEST_CASE("t-test degenerate inputs") {
  CHECK_THROWS_AS(one_sample_t_test(std::vector<double>{1.0}), TestError);
  CHECK_THROWS_AS(one_sample_t_test(std::vector<double>{2.0, 2.0, 2.0}), TestError);
}

TEST_CASE("t p-values match numeric integration of the density") {
  for (double df : {4.0, 30.0, 256.0})
    for (double t : {0.1, 0.7, 1.5, 2.2, 3.0, 4.5, 8.0}) {
      INFO("df " << df << " t " << t);
      CHECK(std::abs(student_t_two_sided_p(t, df) - oracle::t_two_sided_p(t, df)) < 1e-6);
      CHECK(student_t_two_sided_p(-t, df) == student_t_two_sided_p(t, df));
    }
}

TEST_CASE("t-test p-value matches Monte Carlo under the null") {
  Rng rng(31);
  const int n = 1000000;
  int extreme = 0;
  std::vector<double> sample(5);
  for (int i = 0; i < n; ++i) {
    for (auto& x : sample) x = rng.normal();
    if (std::abs(one_sample_t_test(sample).statistic) >= 4.2426) ++extreme;
  }
  const double p = 0.0132;
  CHECK(static_cast<double>(extreme) / n == Approx(p).margin(4 * std::sqrt(p * (1 - p) / n)));
}

TEST_CASE("OLS slope matches the two-pass covariance formula") {
  Rng rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t, y;
    for (int i = 0; i < 23; ++i) {
      t.push_back(i);
      y.push_back(0.3 - 0.01 * i + 0.05 * rng.normal());
    }
    const auto r = ols_trend(t, y);
    CHECK(std::abs(r.estimate - oracle::two_pass_slope(t, y)) < 1e-12);
    CHECK(r.df == 21);
  }
}

TEST_CASE("OLS exact fits and degenerate inputs") {
  const std::vector<double> t{0, 1, 2, 3};
  const auto line = ols_trend(t, std::vector<double>{1, 3, 5, 7});
  CHECK(line.estimate == Approx(2.0));
  CHECK(line.p_value == kMinP);
  const auto flat = ols_trend(t, std::vector<double>{4, 4, 4, 4});
  CHECK(flat.estimate == 0.0);
  CHECK(flat.p_value == 1.0);
  CHECK_THROWS_AS(ols_trend(std::vector<double>{1, 2}, std::vector<double>{1, 2}), TestError);
  CHECK_THROWS_AS(ols_trend(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), TestError);
}

TEST_CASE("null p-values are uniform (Kolmogorov-Smirnov)") {
  Rng rng(33);
  std::vector<double> t_ps, trend_ps;
  std::vector<double> time(23);
  for (int i = 0; i < 23; ++i) time[static_cast<std::size_t>(i)] = i;
  std::vector<double> y(23), sample(30);
  for (int k = 0; k < 1000; ++k) {
    for (auto& x : sample) x = rng.normal();
    t_ps.push_back(one_sample_t_test(sample).p_value);
    for (auto& v : y) v = rng.normal();
    // Permuting the series against time leaves it exchangeable under the null.
    for (std::size_t i = y.size(); i > 1; --i) std::swap(y[i - 1], y[rng.index(i)]);
    trend_ps.push_back(ols_trend(time, y).p_value);
  }
  const double critical = 1.358 / std::sqrt(1000.0);
  CHECK(oracle::ks_uniform(t_ps) < critical);
  CHECK(oracle::ks_uniform(trend_ps) < critical);
}

TEST_CASE("ranks and Spearman correlation") {
  CHECK(average_ranks(std::vector<double>{3, 1, 3, 2}) == std::vector<double>{3.5, 1, 3.5, 2});
  CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 4, 9, 16}) == Approx(1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{4, 3, 2, 1}) == Approx(-1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{5, 5, 5}) == 0.0);
}

TEST_CASE("t critical values and confidence intervals") {
  CHECK(student_t_critical(4) == Approx(2.776445).margin(1e-5));
  CHECK(student_t_critical(1e6) == Approx(1.959966).margin(1e-4));
  const std::vector<double> v{1, 2, 3, 4, 5};
  const auto ci = confidence_interval(v);
  CHECK(ci.lo == Approx(3 - 2.776445 * std::sqrt(0.5)).margin(1e-5));
  CHECK(ci.hi == Approx(3 + 2.776445 * std::sqrt(0.5)).margin(1e-5));
}
