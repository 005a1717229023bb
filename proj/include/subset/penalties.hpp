#pragma once

// Penalty construction: closed-form defaults for the Gaussian change-in-mean
// setting and Monte Carlo calibration of beta to a target false-alarm rate,
// with K always tied to beta by K = beta + d + sqrt(2 beta d).

#include <vector>

#include "subset/core.hpp"
#include "subset/single_change.hpp"
#include "subset/wbs.hpp"

namespace subset {

/// K = beta + d + sqrt(2 beta d).
double dense_cap(double beta, std::size_t d);

/// alpha = 2 ln d, beta = (J + eps) ln n, K = dense_cap(beta, d).
PenaltyConfig theoretical_penalties(std::size_t n, std::size_t d, double J = 2.0, double eps = 0.1);

/// alpha = 2 ln d with K slaved to the given beta.
PenaltyConfig penalties_for_beta(double beta, std::size_t d, PenaltySource source);

/// Sparse-regime beta (sqrt(2 d q) + C sqrt(ln n))^2 with q = erfc(sqrt(ln d)).
double sparse_beta_lemma3(std::size_t n, std::size_t d, double C);

/// Data-generating model used for calibration replicates.
struct NullModel {
  ModelKind kind = ModelKind::gaussian;
  double sigma = 1.0;            // gaussian noise scale (treated as known)
  std::vector<double> r{20.0};   // negbin dispersion, one entry or one per variate
  std::vector<double> p{0.5};    // negbin success probability, same shape rules
  double r_max = kDefaultDispersionCap;
};

TimeSeriesMatrix generate_null(const NullModel& null, std::size_t n, std::size_t d, RandomSource& rng);

/// Cost model the detector would build for a null replicate: known sigma
/// for Gaussian data, method-of-moments dispersion for counts.
CostModel null_cost_model(const NullModel& null, const TimeSeriesMatrix& data);

/// Smallest beta (K tied to it, alpha fixed) for which no interval in the
/// set yields max_t S_t > 0. This is exactly the point where the top-level
/// search, and hence the whole procedure, reports nothing.
double minimal_null_beta(const CostModel& model, double alpha, const IntervalSet& intervals);

/// Inverse-ECDF quantile: the ceil(prob * size)-th order statistic.
double empirical_quantile(std::vector<double> values, double prob);

struct CalibrationSpec {
  std::size_t n = 0;
  std::size_t d = 0;
  NullModel null;
  double target_fp = 0.05;
  std::size_t reps = 200;
  std::size_t intervals = 0;  // 0 = single scan of (1, n)
};

struct CalibrationResult {
  PenaltyConfig penalties;
  std::vector<double> minimal_betas;  // one per replicate, replicate order
};

/// Replicate k uses rng.substream(k) for both data and intervals, so the
/// result does not depend on thread scheduling.
CalibrationResult calibrate_beta(const CalibrationSpec& spec, const RandomSource& rng,
                                 Execution exec = Execution::parallel);

}  // namespace subset
