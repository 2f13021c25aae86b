#pragma once

// Special functions and the two tests used on overcitation data: the
// one-sample t-test and the OLS time trend. Everything here is pure.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "citesim/error.hpp"

namespace citesim::stats {

/// ln Γ(x) for x > 0 (Lanczos, g = 7, nine terms; relative error ~1e-15).
inline double log_gamma(double x) {
  static constexpr double kCoef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                      771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) {
    // Reflection keeps the series in its accurate range.
    return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
  }
  x -= 1.0;
  double sum = kCoef[0];
  const double t = x + 7.5;
  for (int i = 1; i < 9; ++i) sum += kCoef[i] / (x + i);
  return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(sum);
}

inline double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  // The continued fraction converges fastest below the mean; use symmetry above it.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

inline constexpr double kMinP = 1e-300;

/// Two-sided p-value of a Student-t statistic.
inline double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return kMinP;
  const double p = incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
  return std::clamp(p, kMinP, 1.0);
}

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  double estimate = 0.0;  // sample mean or slope
};

inline double mean(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation (n - 1 denominator).
inline double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double standard_error(std::span<const double> v) {
  return v.size() < 2 ? 0.0 : stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

inline TestResult one_sample_t_test(std::span<const double> values, double null_mean = 0.0) {
  if (values.size() < 2) throw TestError("t-test needs at least two values");
  const double m = mean(values);
  const double sd = stddev(values);
  if (!(sd > 0.0)) throw TestError("t-test on zero-variance sample");
  const double n = static_cast<double>(values.size());
  TestResult r;
  r.statistic = (m - null_mean) / (sd / std::sqrt(n));
  r.df = n - 1.0;
  r.p_value = student_t_two_sided_p(r.statistic, r.df);
  r.estimate = m;
  return r;
}

/// Least-squares slope of y on t with its t statistic (df = n - 2).
inline TestResult ols_trend(std::span<const double> time, std::span<const double> y) {
  if (time.size() != y.size()) throw TestError("ols_trend: length mismatch");
  if (time.size() < 3) throw TestError("ols_trend needs at least three points");
  const double n = static_cast<double>(time.size());
  const double tm = mean(time), ym = mean(y);
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < time.size(); ++i) {
    stt += (time[i] - tm) * (time[i] - tm);
    sty += (time[i] - tm) * (y[i] - ym);
  }
  if (!(stt > 0.0)) throw TestError("ols_trend: time has zero variance");
  const double slope = sty / stt;
  const double intercept = ym - slope * tm;
  double sse = 0.0;
  for (std::size_t i = 0; i < time.size(); ++i) {
    const double r = y[i] - (intercept + slope * time[i]);
    sse += r * r;
  }
  TestResult res;
  res.df = n - 2.0;
  res.estimate = slope;
  const double se = std::sqrt(sse / res.df / stt);
  // Residuals at rounding level mean the fit is exact.
  const double scale = std::max(std::abs(slope), std::abs(ym)) + 1.0;
  if (se <= 1e-14 * scale) {
    res.statistic = slope == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), slope);
    res.p_value = slope == 0.0 ? 1.0 : kMinP;
    return res;
  }
  res.statistic = slope / se;
  res.p_value = student_t_two_sided_p(res.statistic, res.df);
  return res;
}

/// Ranks (1-based) with ties sharing their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw TestError("spearman needs two equal-length samples");
  const auto rx = average_ranks(x), ry = average_ranks(y);
  return pearson(rx, ry);
}

/// Two-sided Student-t quantile, found by bisection on the p-value.
inline double student_t_critical(double df, double alpha = 0.05) {
  double lo = 0.0, hi = 1e3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_two_sided_p(mid, df) > alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct Interval {
  double lo = 0.0, hi = 0.0;
};

/// Two-sided 95% t confidence interval for the mean.
inline Interval confidence_interval(std::span<const double> v, double level = 0.95) {
  const double m = mean(v);
  if (v.size() < 2) return {m, m};
  const double half = student_t_critical(static_cast<double>(v.size() - 1), 1.0 - level) * standard_error(v);
  return {m - half, m + half};
}

}  // namespace citesim::stats
