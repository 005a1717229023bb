#pragma once

// Per-variate optimal partitioning restricted to the candidate changepoints.
// Each variate keeps a candidate only if splitting there lowers its cost by
// more than alpha; candidates kept by no variate are dropped.

#include <span>
#include <vector>

#include "subset/core.hpp"
#include "subset/costs.hpp"
#include "subset/single_change.hpp"

namespace subset {

struct VariateSelection {
  std::vector<std::size_t> splits;  // selected positions, ascending
  double objective = 0.0;           // sum over segments of (cost + alpha), minus alpha
};

/// Minimises sum_k [C(y_{i, xi_{k-1}+1 : xi_k}) + alpha] over subsets of the
/// candidates with xi_0 = 0 and xi_{m+1} = n. With prune set, PELT-style
/// pruning discards split points that can never be optimal again.
VariateSelection select_candidates(const CostModel& model, std::size_t i, std::span<const std::size_t> candidates,
                                   double alpha, bool prune = false);

struct PostprocessOptions {
  bool prune = false;
  Execution exec = Execution::serial;
};

/// Replaces affected sets with the per-variate selections and removes
/// candidates no variate selects. Kinds and statistics are carried over.
SegmentationResult postprocess(const CostModel& model, double alpha, const SegmentationResult& candidates,
                               PostprocessOptions options = {});

}  // namespace subset
