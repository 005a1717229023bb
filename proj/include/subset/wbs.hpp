#pragma once

// Wild binary segmentation driver. A fixed set of random intervals is drawn
// once; each active segment is tested on itself and on every stored interval
// it contains, the strongest candidate is recorded, and the search recurses on
// [l, tau] and [tau + 1, u].

#include <functional>
#include <optional>
#include <vector>

#include "subset/core.hpp"
#include "subset/costs.hpp"
#include "subset/single_change.hpp"

namespace subset {

inline constexpr std::size_t kDefaultIntervals = 1000;

struct IntervalSet {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::vector<Interval> pairs;  // pairs[0] is always (1, n)

  std::size_t random_count() const { return pairs.empty() ? 0 : pairs.size() - 1; }
};

/// M random intervals, endpoints sorted from two uniform draws on 1..n with
/// equal draws redrawn, plus the full interval at index 0.
IntervalSet draw_intervals(std::size_t n, std::size_t M, RandomSource& rng);

using IntervalScanner = std::function<std::optional<ScanCandidate>(Interval)>;

/// Generic recursion shared by the penalised statistic and the CUSUM
/// baselines. Returns candidates sorted by tau. The scanner must be pure and
/// safe to call concurrently when exec is parallel.
std::vector<ScanCandidate> wbs_search(const IntervalSet& intervals, const IntervalScanner& scanner,
                                      Execution exec = Execution::serial);

/// Candidates before post-processing.
SegmentationResult subset_wbs(const CostModel& model, const PenaltyConfig& penalties, const IntervalSet& intervals,
                              Execution exec = Execution::serial);

SegmentationResult to_result(std::vector<ScanCandidate> candidates, const PenaltyConfig& penalties, ModelKind model,
                             const IntervalSet& intervals);

}  // namespace subset
