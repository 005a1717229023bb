#pragma once

// Ingestion, report serialisation, residual diagnostics and the end-to-end
// detect pipeline behind the command-line tool.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "subset/core.hpp"
#include "subset/costs.hpp"
#include "subset/penalties.hpp"

namespace subset {

/// CSV with header `time,<name1>,...,<named>`, one row per time point.
/// The first column is kept verbatim as the time label.
TimeSeriesMatrix parse_csv(std::istream& in);
TimeSeriesMatrix read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const TimeSeriesMatrix& data);

/// Pearson residuals under the fitted segmentation: each variate is split at
/// the detections that list it as affected and fitted with segment means.
std::vector<std::vector<double>> pearson_residuals(const TimeSeriesMatrix& data, const SegmentationResult& result,
                                                   const CostModel& model);

struct CorrelationSummary {
  std::vector<std::vector<double>> matrix;
  double mean_off_diagonal = 0.0;
};

/// Throws NumericalError if a residual series has zero variance.
CorrelationSummary pearson_residual_correlations(const TimeSeriesMatrix& data, const SegmentationResult& result,
                                                 const CostModel& model);

struct ReportDetection {
  std::size_t tau = 0;
  std::string time_label;
  ChangeKind kind = ChangeKind::sparse;
  std::vector<std::string> affected;
  double statistic = 0.0;

  bool operator==(const ReportDetection&) const = default;
};

struct AnalysisReport {
  std::size_t n = 0;
  std::size_t d = 0;
  ModelKind model = ModelKind::gaussian;
  PenaltyConfig penalties;
  std::uint64_t seed = 0;
  std::size_t intervals = 0;
  std::vector<ReportDetection> detections;
  std::optional<double> mean_residual_correlation;

  bool operator==(const AnalysisReport&) const = default;
};

nlohmann::json report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const nlohmann::json& j);

AnalysisReport make_report(const TimeSeriesMatrix& data, const SegmentationResult& result,
                           std::optional<double> mean_residual_correlation);

/// Flat `tau,time_label,variate` rows, one per affected variate.
std::string pairs_csv(const AnalysisReport& report);

/// Write to a sibling temporary file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct DetectOptions {
  ModelKind model = ModelKind::negbin;
  std::optional<PenaltyConfig> manual;  // skips calibration when set
  double target_fp = 0.05;
  std::size_t calib_reps = 200;
  std::size_t intervals = kDefaultIntervals;
  std::uint64_t seed = 0;
  std::vector<double> sigma;  // empty = estimate per variate
  double r_max = kDefaultDispersionCap;
  double null_r = 20.0;  // count calibration null model
  double null_p = 0.5;
  bool postprocess = true;
};

struct DetectOutcome {
  AnalysisReport report;
  SegmentationResult result;
  std::vector<std::string> warnings;
};

/// Calibrate (unless manual penalties are given), segment, post-process and
/// compute residual diagnostics. Calibration uses stream 1 of the seed and
/// interval drawing stream 2.
DetectOutcome run_detect(const TimeSeriesMatrix& data, const DetectOptions& options);

}  // namespace subset
