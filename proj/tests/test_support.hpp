#pragma once

// Test-only helpers: data generators independent of the library's RandomSource
// and brute-force oracles that do not reuse the code paths under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "subset/core.hpp"

namespace subset::testing {

inline std::vector<std::vector<double>> gaussian_rows(std::size_t d, std::size_t n, unsigned seed, double scale = 1.0) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> z(0.0, scale);
  std::vector<std::vector<double>> rows(d, std::vector<double>(n));
  for (auto& r : rows) {
    for (auto& v : r) v = z(gen);
  }
  return rows;
}

inline std::vector<std::vector<double>> count_rows(std::size_t d, std::size_t n, unsigned seed, int r = 5,
                                                   double p = 0.4) {
  std::mt19937 gen(seed);
  std::negative_binomial_distribution<int> nb(r, p);
  std::vector<std::vector<double>> rows(d, std::vector<double>(n));
  for (auto& row : rows) {
    for (auto& v : row) v = nb(gen);
  }
  return rows;
}

/// Direct two-pass residual sum of squares over s..t (1-based).
inline double direct_rss(const std::vector<double>& y, std::size_t s, std::size_t t, double sigma) {
  double mean = 0.0;
  for (std::size_t j = s; j <= t; ++j) mean += y[j - 1];
  mean /= static_cast<double>(t - s + 1);
  double rss = 0.0;
  for (std::size_t j = s; j <= t; ++j) rss += (y[j - 1] - mean) * (y[j - 1] - mean);
  return rss / (sigma * sigma);
}

/// CUSUM from raw loops: sqrt(a b / L) |mean(t+1..u) - mean(l..t)| / sigma.
inline double direct_cusum(const std::vector<double>& y, std::size_t l, std::size_t u, std::size_t t, double sigma) {
  double left = 0.0, right = 0.0;
  for (std::size_t j = l; j <= t; ++j) left += y[j - 1];
  for (std::size_t j = t + 1; j <= u; ++j) right += y[j - 1];
  const double a = static_cast<double>(t - l + 1);
  const double b = static_cast<double>(u - t);
  return std::sqrt(a * b / (a + b)) * std::abs(right / b - left / a) / sigma;
}

/// Negative binomial log-likelihood of a segment at success probability p.
inline double negbin_loglik(const std::vector<double>& y, std::size_t s, std::size_t t, double r, double p) {
  double ll = 0.0;
  for (std::size_t j = s; j <= t; ++j) {
    const double v = y[j - 1];
    ll += std::lgamma(v + r) - std::lgamma(r) - std::lgamma(v + 1.0) + r * std::log(p);
    if (v > 0.0) ll += v * std::log1p(-p);
  }
  return ll;
}

/// Golden-section maximisation of f on [lo, hi].
inline double golden_max(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters; ++k) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

/// max over subsets S of sum_{i in S} D_i - min(beta + alpha |S|, K),
/// enumerated explicitly. Returns the value and the best mask.
inline std::pair<double, unsigned> brute_force_subset(const std::vector<double>& gains, double alpha, double beta,
                                                      double K) {
  const unsigned d = static_cast<unsigned>(gains.size());
  double best = -1e300;
  unsigned arg = 0;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    double sum = 0.0;
    unsigned count = 0;
    for (unsigned i = 0; i < d; ++i) {
      if (mask & (1u << i)) {
        sum += gains[i];
        ++count;
      }
    }
    const double v = sum - std::min(beta + alpha * count, K);
    if (v > best) {
      best = v;
      arg = mask;
    }
  }
  return {best, arg};
}

}  // namespace subset::testing
