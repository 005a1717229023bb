#include "subset/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

namespace subset {

namespace {

double per_variate(const std::vector<double>& v, std::size_t i, const char* what) {
  if (v.size() == 1) return v.front();
  if (i >= v.size()) throw InputError(std::string(what) + " list must have one entry or one per variate");
  return v[i];
}

// Smallest beta >= 0 with beta + sqrt(2 d beta) >= total - d.
double dense_root(double total, std::size_t d) {
  const double excess = total - static_cast<double>(d);
  if (excess <= 0.0) return 0.0;
  const double b = std::sqrt(2.0 * static_cast<double>(d));
  const double x = 0.5 * (-b + std::sqrt(b * b + 4.0 * excess));
  return x * x;
}

constexpr double kBetaBracket = 1e6;

}  // namespace

double dense_cap(double beta, std::size_t d) {
  const double dd = static_cast<double>(d);
  return beta + dd + std::sqrt(2.0 * beta * dd);
}

PenaltyConfig theoretical_penalties(std::size_t n, std::size_t d, double J, double eps) {
  if (n < 2) throw InputError("theoretical penalties need n >= 2");
  if (d < 2) throw InputError("theoretical penalties need d >= 2; supply manual penalties for d = 1");
  if (!(J > 0.0) || !(eps > 0.0)) throw InputError("J and eps must be positive");
  PenaltyConfig p;
  p.alpha = 2.0 * std::log(static_cast<double>(d));
  p.beta = (J + eps) * std::log(static_cast<double>(n));
  p.K = dense_cap(p.beta, d);
  p.source = PenaltySource::theoretical;
  return p;
}

PenaltyConfig penalties_for_beta(double beta, std::size_t d, PenaltySource source) {
  if (d < 2) throw InputError("penalties need d >= 2");
  PenaltyConfig p;
  p.alpha = 2.0 * std::log(static_cast<double>(d));
  p.beta = beta;
  p.K = dense_cap(beta, d);
  p.source = source;
  return p;
}

double sparse_beta_lemma3(std::size_t n, std::size_t d, double C) {
  if (d < 2) throw InputError("sparse_beta_lemma3 needs d >= 2");
  if (!(C > 0.0)) throw InputError("C must be positive");
  const double q = std::erfc(std::sqrt(std::log(static_cast<double>(d))));
  const double root = std::sqrt(2.0 * static_cast<double>(d) * q) + C * std::sqrt(std::log(static_cast<double>(n)));
  return root * root;
}

TimeSeriesMatrix generate_null(const NullModel& null, std::size_t n, std::size_t d, RandomSource& rng) {
  std::vector<std::vector<double>> rows(d, std::vector<double>(n));
  for (std::size_t i = 0; i < d; ++i) {
    if (null.kind == ModelKind::gaussian) {
      for (auto& v : rows[i]) v = null.sigma * rng.normal();
    } else {
      const double r = per_variate(null.r, i, "r");
      const double p = per_variate(null.p, i, "p");
      for (auto& v : rows[i]) v = rng.negbin(r, p);
    }
  }
  return make_matrix(std::move(rows));
}

CostModel null_cost_model(const NullModel& null, const TimeSeriesMatrix& data) {
  if (null.kind == ModelKind::gaussian) return CostModel::gaussian(data, {null.sigma});
  return CostModel::negbin(data, null.r_max);
}

double minimal_null_beta(const CostModel& model, double alpha, const IntervalSet& intervals) {
  PenaltyConfig raw;
  raw.alpha = alpha;
  double best = 0.0;
  for (const Interval& iv : intervals.pairs) {
    if (iv.hi - iv.lo <= 1) continue;
    const StatisticProfile prof = statistic_profile(model, raw, iv);
    const double soft = *std::max_element(prof.sparse.begin(), prof.sparse.end());
    const double total = *std::max_element(prof.dense.begin(), prof.dense.end());
    best = std::max({best, soft, dense_root(total, model.dims())});
  }
  if (best > kBetaBracket) throw NumericalError("calibration bracket exhausted: minimal beta exceeds 1e6");
  return best;
}

double empirical_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::ceil(prob * static_cast<double>(values.size()) - 1e-12);
  const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(pos, 1.0)), 1, values.size());
  return values[k - 1];
}

CalibrationResult calibrate_beta(const CalibrationSpec& spec, const RandomSource& rng, Execution exec) {
  if (spec.reps == 0) throw InputError("calibration needs reps > 0");
  if (spec.reps < 20) throw InputError("calibration needs at least 20 replicates");
  if (!(spec.target_fp > 0.0 && spec.target_fp < 1.0)) throw InputError("target false-alarm rate must be in (0, 1)");
  if (spec.d < 2) throw InputError("calibration needs d >= 2 (alpha = 2 ln d)");
  if (spec.n < 3) throw InputError("calibration needs n >= 3");

  const double alpha = 2.0 * std::log(static_cast<double>(spec.d));
  CalibrationResult out;
  out.minimal_betas.assign(spec.reps, 0.0);

  std::exception_ptr failure;
  std::mutex failure_lock;
  const long long reps = static_cast<long long>(spec.reps);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (long long k = 0; k < reps; ++k) {
    try {
      const RandomSource rep = rng.substream(static_cast<std::uint64_t>(k));
      RandomSource data_rng = rep.substream(0);
      RandomSource interval_rng = rep.substream(1);
      const TimeSeriesMatrix data = generate_null(spec.null, spec.n, spec.d, data_rng);
      const CostModel model = null_cost_model(spec.null, data);
      const IntervalSet set = draw_intervals(spec.n, spec.intervals, interval_rng);
      out.minimal_betas[static_cast<std::size_t>(k)] = minimal_null_beta(model, alpha, set);
    } catch (...) {
      std::lock_guard<std::mutex> guard(failure_lock);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  const double beta = empirical_quantile(out.minimal_betas, 1.0 - spec.target_fp);
  out.penalties = penalties_for_beta(beta, spec.d, PenaltySource::calibrated);
  out.penalties.target_fp = spec.target_fp;
  out.penalties.calib_reps = spec.reps;
  return out;
}

}  // namespace subset
