#include "subset/wbs.hpp"

#include <algorithm>

namespace subset {

IntervalSet draw_intervals(std::size_t n, std::size_t M, RandomSource& rng) {
  if (n < 3) throw InputError("wild binary segmentation needs n >= 3");
  IntervalSet set;
  set.n = n;
  set.seed = rng.seed();
  set.pairs.reserve(M + 1);
  set.pairs.push_back({1, n});
  for (std::size_t j = 0; j < M; ++j) {
    std::size_t r = rng.uniform_index(1, n);
    std::size_t s = rng.uniform_index(1, n);
    while (r == s) s = rng.uniform_index(1, n);
    set.pairs.push_back({std::min(r, s), std::max(r, s)});
  }
  return set;
}

std::vector<ScanCandidate> wbs_search(const IntervalSet& intervals, const IntervalScanner& scanner, Execution exec) {
  const std::size_t count = intervals.pairs.size();
  // Results for stored random intervals do not depend on the active segment.
  std::vector<std::optional<ScanCandidate>> cache(count);
  std::vector<char> cached(count, 0);

  std::vector<ScanCandidate> found;
  std::vector<Interval> active{{1, intervals.n}};
  while (!active.empty()) {
    const Interval seg = active.back();
    active.pop_back();
    if (seg.hi <= seg.lo + 1) continue;

    std::vector<std::size_t> todo;
    std::vector<std::size_t> eligible;
    for (std::size_t j = 1; j < count; ++j) {
      const Interval& iv = intervals.pairs[j];
      if (iv.hi - iv.lo > 1 && iv.lo >= seg.lo && iv.hi <= seg.hi) {
        eligible.push_back(j);
        if (!cached[j]) todo.push_back(j);
      }
    }

    std::optional<ScanCandidate> own = scanner(seg);
    const long long m = static_cast<long long>(todo.size());
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
    for (long long k = 0; k < m; ++k) {
      const std::size_t j = todo[static_cast<std::size_t>(k)];
      cache[j] = scanner(intervals.pairs[j]);
    }
    for (std::size_t j : todo) cached[j] = 1;

    // Active segment plays the role of interval 0; smaller index wins ties.
    std::optional<ScanCandidate> best = std::move(own);
    for (std::size_t j : eligible) {
      const auto& c = cache[j];
      if (c && (!best || c->statistic > best->statistic)) best = c;
    }
    if (!best) continue;

    active.push_back({best->tau + 1, seg.hi});
    active.push_back({seg.lo, best->tau});
    found.push_back(std::move(*best));
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.tau < b.tau; });
  return found;
}

SegmentationResult to_result(std::vector<ScanCandidate> candidates, const PenaltyConfig& penalties, ModelKind model,
                             const IntervalSet& intervals) {
  SegmentationResult r;
  r.penalties = penalties;
  r.model = model;
  r.seed = intervals.seed;
  r.n_intervals = intervals.random_count();
  for (auto& c : candidates) {
    r.detections.push_back({c.tau, c.kind, std::move(c.affected), c.statistic, c.interval});
  }
  return r;
}

SegmentationResult subset_wbs(const CostModel& model, const PenaltyConfig& penalties, const IntervalSet& intervals,
                              Execution exec) {
  penalties.validate();
  if (intervals.n != model.length()) throw InputError("interval set drawn for a different series length");
  auto scanner = [&](Interval iv) { return scan_interval(model, penalties, iv); };
  return to_result(wbs_search(intervals, scanner, exec), penalties, model.kind(), intervals);
}

}  // namespace subset
