#pragma once

// Per-variate segment costs C(y_{i,s:t}) = -2 * maximised log-likelihood.
//
// All tables are prefix sums of length n+1 (entry 0 is zero), stored
// time-major so that a fixed time index touches the d variates contiguously.
// Segment evaluation is O(1).

#include <cmath>
#include <span>
#include <vector>

#include "subset/core.hpp"

namespace subset {

inline constexpr double kDefaultDispersionCap = 1e4;

/// MAD of first differences scaled to a Gaussian standard deviation.
/// Throws NumericalError when the estimate is zero.
double estimate_sigma(std::span<const double> y);

/// Method-of-moments negative binomial dispersion m^2 / (v - m), capped at
/// r_max (also returned when v <= m).
double estimate_dispersion(std::span<const double> y, double r_max = kDefaultDispersionCap);

class CostModel {
 public:
  /// Gaussian change in mean with known per-variate sigma. An empty sigma
  /// vector means "estimate each from the data"; a single entry applies to
  /// every variate.
  static CostModel gaussian(const TimeSeriesMatrix& data, std::vector<double> sigma = {});

  /// Negative binomial change in success probability with a per-variate
  /// dispersion fixed over the whole series. An empty dispersion vector means
  /// method-of-moments estimation with the given cap.
  static CostModel negbin(const TimeSeriesMatrix& data, double r_max = kDefaultDispersionCap,
                          std::vector<double> dispersion = {});

  ModelKind kind() const { return kind_; }
  std::size_t dims() const { return d_; }
  std::size_t length() const { return n_; }

  const std::vector<double>& sigma() const { return sigma_; }
  const std::vector<double>& dispersion() const { return dispersion_; }

  /// Full segment cost for variate i over s..t (1-based, inclusive).
  double cost(std::size_t i, std::size_t s, std::size_t t) const;

  /// Segment cost with data-only additive terms dropped. These terms cancel
  /// in every likelihood-ratio difference, so D and the partitioning
  /// objectives are unchanged.
  double reduced_cost(std::size_t i, std::size_t s, std::size_t t) const {
    const double sum = sum_[t * d_ + i] - sum_[(s - 1) * d_ + i];
    return reduced_from_sum(i, sum, static_cast<double>(t - s + 1));
  }

  double reduced_from_sum(std::size_t i, double sum, double len) const {
    if (kind_ == ModelKind::gaussian) return -(sum * sum) / (len * var_[i]);
    const double lr = len * dispersion_[i];
    return -2.0 * (xlogx(sum) + xlogx(lr) - xlogx(sum + lr));
  }

  /// Sum of the stored values over s..t. Gaussian values are centred on the
  /// variate's full-series mean; add mean_offset(i) * length for raw sums.
  double segment_sum(std::size_t i, std::size_t s, std::size_t t) const {
    return sum_[t * d_ + i] - sum_[(s - 1) * d_ + i];
  }
  double mean_offset(std::size_t i) const { return offset_[i]; }

  /// Raw prefix sums, time-major: prefix_sums()[j * dims() + i].
  std::span<const double> prefix_sums() const { return sum_; }

 private:
  static double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }
  void check_segment(std::size_t i, std::size_t s, std::size_t t) const;

  ModelKind kind_ = ModelKind::gaussian;
  std::size_t d_ = 0;
  std::size_t n_ = 0;
  std::vector<double> sigma_;
  std::vector<double> var_;
  std::vector<double> dispersion_;
  std::vector<double> offset_;
  std::vector<double> sum_;
  std::vector<double> sumsq_;     // gaussian
  std::vector<double> lbinom_;    // negbin: log C(y + r - 1, y)
};

double gaussian_cost(const CostModel& model, std::size_t i, std::size_t s, std::size_t t);
double negbin_cost(const CostModel& model, std::size_t i, std::size_t s, std::size_t t);

}  // namespace subset
