#include "subset/single_change.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace subset {

namespace {

void check_interval(const CostModel& model, Interval iv) {
  if (iv.lo < 1 || iv.hi > model.length() || iv.lo >= iv.hi) {
    throw InputError("interval outside 1..n");
  }
  if (iv.hi - iv.lo <= 1) throw InputError("interval too short: need u - l > 1");
}

std::vector<std::size_t> sparse_set(const CostModel& model, const PenaltyConfig& penalties, Interval iv,
                                    std::size_t t) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < model.dims(); ++i) {
    if (d_statistic(model, i, iv.lo, iv.hi, t) > penalties.alpha) out.push_back(i);
  }
  return out;
}

std::optional<ScanCandidate> pick_best(const CostModel& model, const PenaltyConfig& penalties,
                                       const StatisticProfile& profile) {
  const Interval iv = profile.interval;
  std::size_t best = 0;
  double best_value = profile.at(iv.lo);
  for (std::size_t k = 1; k < profile.sparse.size(); ++k) {
    const double v = std::max(profile.sparse[k], profile.dense[k]);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  if (!(best_value > 0.0)) return std::nullopt;

  ScanCandidate c;
  c.tau = iv.lo + best;
  c.statistic = best_value;
  c.interval = iv;
  c.kind = profile.sparse[best] >= profile.dense[best] ? ChangeKind::sparse : ChangeKind::dense;
  if (c.kind == ChangeKind::sparse) {
    c.affected = sparse_set(model, penalties, iv, c.tau);
  } else {
    c.affected.resize(model.dims());
    for (std::size_t i = 0; i < model.dims(); ++i) c.affected[i] = i;
  }
  return c;
}

}  // namespace

double d_statistic(const CostModel& model, std::size_t i, std::size_t l, std::size_t u, std::size_t t) {
  if (t < l || t >= u) throw InputError("split t outside [l, u-1]");
  const double gain = model.reduced_cost(i, l, u) - model.reduced_cost(i, l, t) - model.reduced_cost(i, t + 1, u);
  return std::max(gain, 0.0);
}

BranchValues aggregate_gains(std::span<const double> gains, const PenaltyConfig& penalties) {
  double soft = 0.0;
  double total = 0.0;
  for (double g : gains) {
    soft += std::max(g - penalties.alpha, 0.0);
    total += g;
  }
  return {soft - penalties.beta, total - penalties.K};
}

double StatisticProfile::at(std::size_t t) const {
  const std::size_t k = t - interval.lo;
  return std::max(sparse[k], dense[k]);
}

StatisticProfile statistic_profile(const CostModel& model, const PenaltyConfig& penalties, Interval iv,
                                   Execution exec) {
  check_interval(model, iv);
  const std::size_t d = model.dims();
  const std::size_t l = iv.lo;
  const std::size_t u = iv.hi;
  const auto prefix = model.prefix_sums();

  std::vector<double> whole(d);
  for (std::size_t i = 0; i < d; ++i) whole[i] = model.reduced_cost(i, l, u);

  StatisticProfile p;
  p.interval = iv;
  p.sparse.resize(u - l);
  p.dense.resize(u - l);

  const double alpha = penalties.alpha;
  const double len = static_cast<double>(u - l + 1);
  const long long first = static_cast<long long>(l);
  const long long last = static_cast<long long>(u) - 1;
  const bool parallel = exec == Execution::parallel;

#pragma omp parallel for schedule(static) if (parallel)
  for (long long tt = first; tt <= last; ++tt) {
    const std::size_t t = static_cast<std::size_t>(tt);
    const double* base = prefix.data() + (l - 1) * d;
    const double* mid = prefix.data() + t * d;
    const double* top = prefix.data() + u * d;
    const double left_len = static_cast<double>(t - l + 1);
    const double right_len = len - left_len;
    double soft = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double left = mid[i] - base[i];
      const double right = top[i] - mid[i];
      double g = whole[i] - model.reduced_from_sum(i, left, left_len) - model.reduced_from_sum(i, right, right_len);
      g = std::max(g, 0.0);
      soft += std::max(g - alpha, 0.0);
      total += g;
    }
    p.sparse[t - l] = soft - penalties.beta;
    p.dense[t - l] = total - penalties.K;
  }
  return p;
}

std::optional<ScanCandidate> scan_interval(const CostModel& model, const PenaltyConfig& penalties, Interval iv,
                                           Execution exec) {
  return pick_best(model, penalties, statistic_profile(model, penalties, iv, exec));
}

std::optional<ScanCandidate> scan_interval_reference(const CostModel& model, const PenaltyConfig& penalties,
                                                     Interval iv) {
  check_interval(model, iv);
  StatisticProfile p;
  p.interval = iv;
  std::vector<double> gains(model.dims());
  for (std::size_t t = iv.lo; t < iv.hi; ++t) {
    for (std::size_t i = 0; i < model.dims(); ++i) gains[i] = d_statistic(model, i, iv.lo, iv.hi, t);
    const BranchValues b = aggregate_gains(gains, penalties);
    p.sparse.push_back(b.sparse);
    p.dense.push_back(b.dense);
  }
  return pick_best(model, penalties, p);
}

}  // namespace subset
