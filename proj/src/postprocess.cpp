#include "subset/postprocess.hpp"

#include <algorithm>
#include <limits>

namespace subset {

VariateSelection select_candidates(const CostModel& model, std::size_t i, std::span<const std::size_t> candidates,
                                   double alpha, bool prune) {
  const std::size_t n = model.length();
  const std::size_t q = candidates.size();
  for (std::size_t k = 0; k < q; ++k) {
    if (candidates[k] < 1 || candidates[k] >= n) throw InputError("candidate outside 1..n-1");
    if (k > 0 && candidates[k] <= candidates[k - 1]) throw InputError("candidates must be strictly increasing");
  }

  // Boundaries xi_0 = 0, xi_1..xi_q, xi_{q+1} = n.
  std::vector<std::size_t> xi(q + 2);
  xi[0] = 0;
  std::copy(candidates.begin(), candidates.end(), xi.begin() + 1);
  xi[q + 1] = n;

  std::vector<double> F(q + 2, 0.0);
  std::vector<std::size_t> back(q + 2, 0);
  F[0] = -alpha;
  std::vector<std::size_t> live{0};
  for (std::size_t j = 1; j <= q + 1; ++j) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    std::vector<double> partial(live.size());
    for (std::size_t a = 0; a < live.size(); ++a) {
      const std::size_t k = live[a];
      partial[a] = F[k] + model.cost(i, xi[k] + 1, xi[j]);
      const double v = partial[a] + alpha;
      if (v < best) {
        best = v;
        arg = k;
      }
    }
    F[j] = best;
    back[j] = arg;
    if (prune) {
      std::vector<std::size_t> kept;
      for (std::size_t a = 0; a < live.size(); ++a) {
        if (partial[a] <= F[j]) kept.push_back(live[a]);
      }
      live = std::move(kept);
    }
    live.push_back(j);
  }

  VariateSelection out;
  out.objective = F[q + 1];
  for (std::size_t j = back[q + 1]; j > 0; j = back[j]) out.splits.push_back(xi[j]);
  std::reverse(out.splits.begin(), out.splits.end());
  return out;
}

SegmentationResult postprocess(const CostModel& model, double alpha, const SegmentationResult& candidates,
                               PostprocessOptions options) {
  SegmentationResult out = candidates;
  out.detections.clear();
  if (candidates.detections.empty()) return out;

  const std::vector<std::size_t> taus = candidates.taus();
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (taus[k] < 1 || taus[k] >= model.length()) throw InputError("candidate outside 1..n-1");
    if (k > 0 && taus[k] <= taus[k - 1]) throw InputError("candidates must be strictly increasing");
  }
  const std::size_t d = model.dims();
  std::vector<VariateSelection> chosen(d);
  const long long dd = static_cast<long long>(d);
#pragma omp parallel for schedule(dynamic) if (options.exec == Execution::parallel)
  for (long long i = 0; i < dd; ++i) {
    chosen[static_cast<std::size_t>(i)] = select_candidates(model, static_cast<std::size_t>(i), taus, alpha, options.prune);
  }

  for (const Detection& det : candidates.detections) {
    Detection kept = det;
    kept.affected.clear();
    for (std::size_t i = 0; i < d; ++i) {
      const auto& s = chosen[i].splits;
      if (std::binary_search(s.begin(), s.end(), det.tau)) kept.affected.push_back(i);
    }
    if (!kept.affected.empty()) out.detections.push_back(std::move(kept));
  }
  return out;
}

}  // namespace subset
