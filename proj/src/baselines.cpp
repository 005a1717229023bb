#include "subset/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "subset/penalties.hpp"

namespace subset {

namespace {

void require_gaussian(const CostModel& model) {
  if (model.kind() != ModelKind::gaussian) {
    throw InputError("CUSUM baselines support the Gaussian model only; use the penalised detector for counts");
  }
}

// Largest aggregate over t on (l, u); argmax is the smallest t on ties.
std::pair<std::size_t, double> best_split(const CostModel& model, const BaselineConfig& config, Interval iv) {
  const std::size_t d = model.dims();
  std::vector<double> w(d);
  std::size_t arg = iv.lo;
  double best = -std::numeric_limits<double>::infinity();
  const double len = static_cast<double>(iv.hi - iv.lo + 1);
  for (std::size_t t = iv.lo; t < iv.hi; ++t) {
    const double left_len = static_cast<double>(t - iv.lo + 1);
    const double right_len = len - left_len;
    const double scale = std::sqrt(left_len * right_len / len);
    for (std::size_t i = 0; i < d; ++i) {
      const double left = model.segment_sum(i, iv.lo, t) / left_len;
      const double right = model.segment_sum(i, t + 1, iv.hi) / right_len;
      w[i] = scale * std::abs(right - left) / model.sigma()[i];
    }
    const double v = baseline_statistic(w, config);
    if (v > best) {
      best = v;
      arg = t;
    }
  }
  return {arg, best};
}

}  // namespace

const char* to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::mean: return "mean";
    case BaselineMethod::max: return "max";
    case BaselineMethod::binweight: return "binweight";
  }
  return "mean";
}

BaselineMethod baseline_method_from_string(const std::string& s) {
  if (s == "mean") return BaselineMethod::mean;
  if (s == "max") return BaselineMethod::max;
  if (s == "binweight") return BaselineMethod::binweight;
  throw InputError("unknown baseline method: " + s);
}

double binweight_alpha_for_length(std::size_t n) { return std::sqrt(2.0 * std::log(static_cast<double>(n))); }
double binweight_alpha_for_dims(std::size_t d) { return std::sqrt(2.0 * std::log(static_cast<double>(d))); }

double cusum(const CostModel& model, std::size_t i, std::size_t l, std::size_t u, std::size_t t) {
  require_gaussian(model);
  if (t < l || t >= u || l < 1 || u > model.length()) throw InputError("split t outside [l, u-1]");
  const double left_len = static_cast<double>(t - l + 1);
  const double right_len = static_cast<double>(u - t);
  const double len = left_len + right_len;
  const double left = model.segment_sum(i, l, t) / left_len;
  const double right = model.segment_sum(i, t + 1, u) / right_len;
  return std::sqrt(left_len * right_len / len) * std::abs(right - left) / model.sigma()[i];
}

double baseline_statistic(std::span<const double> w, const BaselineConfig& config) {
  if (w.empty()) throw InputError("baseline statistic needs d >= 1");
  double agg = 0.0;
  switch (config.method) {
    case BaselineMethod::mean:
      for (double x : w) agg += x;
      agg /= static_cast<double>(w.size());
      break;
    case BaselineMethod::max:
      agg = *std::max_element(w.begin(), w.end());
      break;
    case BaselineMethod::binweight:
      for (double x : w) {
        if (x > config.binweight_alpha) agg += x;
      }
      break;
  }
  return agg - config.threshold;
}

std::optional<ScanCandidate> baseline_scan(const CostModel& model, const BaselineConfig& config, Interval iv) {
  require_gaussian(model);
  if (iv.lo < 1 || iv.hi > model.length() || iv.hi - iv.lo <= 1) throw InputError("interval too short: need u - l > 1");
  const auto [tau, value] = best_split(model, config, iv);
  if (!(value > 0.0)) return std::nullopt;
  ScanCandidate c;
  c.tau = tau;
  c.statistic = value;
  c.kind = ChangeKind::dense;
  c.interval = iv;
  c.affected.resize(model.dims());
  for (std::size_t i = 0; i < model.dims(); ++i) c.affected[i] = i;
  return c;
}

SegmentationResult baseline_wbs(const CostModel& model, const BaselineConfig& config, const IntervalSet& intervals,
                                Execution exec) {
  require_gaussian(model);
  if (intervals.n != model.length()) throw InputError("interval set drawn for a different series length");
  auto scanner = [&](Interval iv) { return baseline_scan(model, config, iv); };
  PenaltyConfig pen;
  pen.beta = config.threshold;
  pen.K = config.threshold;
  return to_result(wbs_search(intervals, scanner, exec), pen, ModelKind::gaussian, intervals);
}

BaselineConfig calibrate_baseline(const BaselineCalibrationSpec& spec, const RandomSource& rng, Execution exec) {
  if (spec.reps == 0) throw InputError("calibration needs reps > 0");
  if (!(spec.target_fp > 0.0 && spec.target_fp < 1.0)) throw InputError("target false-alarm rate must be in (0, 1)");
  if (spec.n < 3 || spec.d < 1) throw InputError("calibration needs n >= 3 and d >= 1");
  BaselineConfig raw{spec.method, 0.0, spec.binweight_alpha};
  std::vector<double> maxima(spec.reps);
  const NullModel null;
  const long long reps = static_cast<long long>(spec.reps);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (long long k = 0; k < reps; ++k) {
    const RandomSource rep = rng.substream(static_cast<std::uint64_t>(k));
    RandomSource data_rng = rep.substream(0);
    RandomSource interval_rng = rep.substream(1);
    const TimeSeriesMatrix data = generate_null(null, spec.n, spec.d, data_rng);
    const CostModel model = CostModel::gaussian(data, {1.0});
    const IntervalSet set = draw_intervals(spec.n, spec.intervals, interval_rng);
    double best = 0.0;
    for (const Interval& iv : set.pairs) {
      if (iv.hi - iv.lo <= 1) continue;
      best = std::max(best, best_split(model, raw, iv).second);
    }
    maxima[static_cast<std::size_t>(k)] = best;
  }
  raw.threshold = empirical_quantile(std::move(maxima), 1.0 - spec.target_fp);
  return raw;
}

}  // namespace subset
