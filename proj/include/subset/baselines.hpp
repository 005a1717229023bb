#pragma once

// CUSUM aggregation baselines (Mean, Max, Bin-Weight) run through the same
// WBS driver. Gaussian change in mean only.

#include <optional>
#include <span>
#include <string>

#include "subset/core.hpp"
#include "subset/costs.hpp"
#include "subset/single_change.hpp"
#include "subset/wbs.hpp"

namespace subset {

enum class BaselineMethod { mean, max, binweight };

const char* to_string(BaselineMethod method);
BaselineMethod baseline_method_from_string(const std::string& s);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::mean;
  double threshold = 0.0;        // beta_b
  double binweight_alpha = 0.0;  // hard threshold on W; Bin-Weight only
};

/// sqrt(2 ln n), the default Bin-Weight hard threshold.
double binweight_alpha_for_length(std::size_t n);
/// sqrt(2 ln d), the alternative tied to the dimension.
double binweight_alpha_for_dims(std::size_t d);

/// Standardised absolute difference of means on l..u split after t.
double cusum(const CostModel& model, std::size_t i, std::size_t l, std::size_t u, std::size_t t);

/// Aggregated CUSUM minus the threshold; positive means detection.
double baseline_statistic(std::span<const double> w, const BaselineConfig& config);

std::optional<ScanCandidate> baseline_scan(const CostModel& model, const BaselineConfig& config, Interval iv);

/// Detections carry every variate as affected and are labelled dense.
SegmentationResult baseline_wbs(const CostModel& model, const BaselineConfig& config, const IntervalSet& intervals,
                                Execution exec = Execution::serial);

struct BaselineCalibrationSpec {
  BaselineMethod method = BaselineMethod::mean;
  std::size_t n = 0;
  std::size_t d = 0;
  double binweight_alpha = 0.0;
  double target_fp = 0.05;
  std::size_t reps = 200;
  std::size_t intervals = 0;
};

/// (1 - target_fp) quantile of the null maximum of the raw aggregate over all
/// intervals, with unit-variance Gaussian noise and known sigma.
BaselineConfig calibrate_baseline(const BaselineCalibrationSpec& spec, const RandomSource& rng,
                                  Execution exec = Execution::parallel);

}  // namespace subset
