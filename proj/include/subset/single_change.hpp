#pragma once

// Single-changepoint test on an interval (l, u): per-variate likelihood-ratio
// gains D_{i,t}, soft-thresholded at alpha and aggregated under the penalty
// min(beta + alpha * p, K).

#include <optional>
#include <span>
#include <vector>

#include "subset/core.hpp"
#include "subset/costs.hpp"

namespace subset {

enum class Execution { serial, parallel };

/// D_{i,t} on the sub-interval l..u: cost(l,u) - cost(l,t) - cost(t+1,u),
/// clamped at zero. Requires l <= t < u.
double d_statistic(const CostModel& model, std::size_t i, std::size_t l, std::size_t u, std::size_t t);

/// The two penalty branches at one split point.
struct BranchValues {
  double sparse = 0.0;  // sum_i max(D_i - alpha, 0) - beta
  double dense = 0.0;   // sum_i D_i - K
  double value() const { return sparse >= dense ? sparse : dense; }
  ChangeKind kind() const { return sparse >= dense ? ChangeKind::sparse : ChangeKind::dense; }
};

BranchValues aggregate_gains(std::span<const double> gains, const PenaltyConfig& penalties);

struct StatisticProfile {
  Interval interval;
  std::vector<double> sparse;  // indexed by t - l
  std::vector<double> dense;

  double at(std::size_t t) const;
};

struct ScanCandidate {
  std::size_t tau = 0;
  double statistic = 0.0;
  ChangeKind kind = ChangeKind::sparse;
  std::vector<std::size_t> affected;
  Interval interval;

  bool operator==(const ScanCandidate&) const = default;
};

StatisticProfile statistic_profile(const CostModel& model, const PenaltyConfig& penalties, Interval iv,
                                   Execution exec = Execution::serial);

/// Best split on (l, u) if max_t S_t > 0. Smallest t wins ties; a tie
/// between branches is labelled sparse. Requires u - l > 1.
std::optional<ScanCandidate> scan_interval(const CostModel& model, const PenaltyConfig& penalties, Interval iv,
                                           Execution exec = Execution::serial);

/// Straightforward version built on d_statistic; kept to check the kernel.
std::optional<ScanCandidate> scan_interval_reference(const CostModel& model, const PenaltyConfig& penalties,
                                                     Interval iv);

}  // namespace subset
