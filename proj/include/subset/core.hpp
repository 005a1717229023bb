#pragma once

// Shared data model for the multivariate changepoint library.
//
// Time indices are 1-based everywhere: a changepoint tau is the last index of
// the pre-change segment, so 1 <= tau <= n-1, and a segment (s, t) covers the
// observations s..t inclusive.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subset {

/// Malformed or inconsistent user input (maps to CLI exit code 1).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that cannot produce a finite answer (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// d x n panel of observations. Counts are stored as doubles.
class TimeSeriesMatrix {
 public:
  TimeSeriesMatrix() = default;
  TimeSeriesMatrix(std::vector<std::vector<double>> rows,
                   std::vector<std::string> variate_names,
                   std::vector<std::string> time_labels = {});

  std::size_t dims() const { return rows_.size(); }
  std::size_t length() const { return rows_.empty() ? 0 : rows_.front().size(); }

  /// Observation for variate i (0-based) at time j (1-based).
  double at(std::size_t i, std::size_t j) const { return rows_[i][j - 1]; }
  std::span<const double> row(std::size_t i) const { return rows_[i]; }

  const std::vector<std::string>& variate_names() const { return names_; }
  const std::vector<std::string>& time_labels() const { return time_labels_; }
  bool has_time_labels() const { return !time_labels_.empty(); }

  /// True when every entry is a non-negative integer.
  bool is_count_data() const;

  bool operator==(const TimeSeriesMatrix&) const = default;

 private:
  std::vector<std::vector<double>> rows_;
  std::vector<std::string> names_;
  std::vector<std::string> time_labels_;
};

/// Validating constructor. Names default to "V1".."Vd" when empty.
TimeSeriesMatrix make_matrix(std::vector<std::vector<double>> rows,
                             std::vector<std::string> names = {});

enum class ChangeKind { sparse, dense };

const char* to_string(ChangeKind kind);
ChangeKind change_kind_from_string(const std::string& s);

struct Interval {
  std::size_t lo = 1;
  std::size_t hi = 1;
  bool operator==(const Interval&) const = default;
};

struct Detection {
  std::size_t tau = 0;
  ChangeKind kind = ChangeKind::sparse;
  std::vector<std::size_t> affected;  // 0-based variate indices, ascending
  double statistic = 0.0;
  Interval interval;

  bool operator==(const Detection&) const = default;
};

enum class PenaltySource { theoretical, calibrated, manual };

const char* to_string(PenaltySource source);
PenaltySource penalty_source_from_string(const std::string& s);

/// Piecewise-linear penalty Pen(p) = min(beta + alpha * p, K).
struct PenaltyConfig {
  double alpha = 0.0;
  double beta = 0.0;
  double K = 0.0;
  PenaltySource source = PenaltySource::manual;
  double target_fp = 0.0;  // 0 when not calibrated
  std::size_t calib_reps = 0;

  double operator()(std::size_t p) const;
  void validate() const;
  bool operator==(const PenaltyConfig&) const = default;
};

enum class ModelKind { gaussian, negbin };

const char* to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct SegmentationResult {
  std::vector<Detection> detections;
  PenaltyConfig penalties;
  ModelKind model = ModelKind::gaussian;
  std::uint64_t seed = 0;
  std::size_t n_intervals = 0;

  std::vector<std::size_t> taus() const;
  bool operator==(const SegmentationResult&) const = default;
};

/// Deterministic random stream keyed on (seed, stream). Never global.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent child stream; depends only on (seed, stream, index).
  RandomSource substream(std::uint64_t index) const;

  std::mt19937_64& engine() { return engine_; }

  std::size_t uniform_index(std::size_t lo, std::size_t hi);  // inclusive
  double normal();
  /// Neg-Bin(r, p) with P(y) = C(y+r-1, y) (1-p)^y p^r, via gamma-Poisson.
  double negbin(double r, double p);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// ceil(ln n): the localisation tolerance used by evaluation.
std::size_t log_tolerance(std::size_t n);

}  // namespace subset
