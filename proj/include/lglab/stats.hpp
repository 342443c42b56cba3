#ifndef LGLAB_STATS_HPP
#define LGLAB_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "lglab/errors.hpp"

namespace lglab::stats {

inline double mean(const std::vector<double>& x) {
  if (x.empty()) throw validation_error("mean: empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double variance(const std::vector<double>& x) {
  if (x.size() < 2) throw validation_error("variance: need at least two values");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

inline double standard_error(const std::vector<double>& x) {
  return std::sqrt(variance(x) / static_cast<double>(x.size()));
}

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0; // sup |F_a - F_b|
  double p_value = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value and the
/// usual small-sample correction of the effective size.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw validation_error("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  r.n_a = a.size();
  r.n_b = b.size();
  return r;
}

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};

/// Pearson test of counts against a uniform expectation.
inline ChiSquareResult chi_square_uniform(const std::vector<double>& counts) {
  if (counts.size() < 2) throw validation_error("chi_square_uniform: need at least two bins");
  double total = 0.0;
  for (double c : counts) total += c;
  if (!(total > 0.0)) throw validation_error("chi_square_uniform: no counts");
  const double expected = total / static_cast<double>(counts.size());
  ChiSquareResult r;
  for (double c : counts) r.statistic += (c - expected) * (c - expected) / expected;
  r.dof = static_cast<double>(counts.size() - 1);
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.dof), r.statistic));
  return r;
}

/// Jackknife standard error of the mean over equal contiguous blocks.
inline double jackknife_stderr(const std::vector<double>& x, std::size_t blocks = 100) {
  if (x.size() < 2) throw validation_error("jackknife_stderr: need at least two values");
  blocks = std::min(blocks, x.size());
  const std::size_t per = x.size() / blocks;
  const std::size_t used = per * blocks;
  std::vector<double> block_sum(blocks, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < used; ++i) {
    block_sum[i / per] += x[i];
    total += x[i];
  }
  std::vector<double> leave_out(blocks);
  double lo_mean = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    leave_out[b] = (total - block_sum[b]) / static_cast<double>(used - per);
    lo_mean += leave_out[b];
  }
  lo_mean /= static_cast<double>(blocks);
  double s = 0.0;
  for (double v : leave_out) s += (v - lo_mean) * (v - lo_mean);
  const double nb = static_cast<double>(blocks);
  return std::sqrt((nb - 1.0) / nb * s);
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw validation_error("fit_slope: need matching samples of size >= 2");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

} // namespace lglab::stats

#endif
