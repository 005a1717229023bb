#include "subset/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>

namespace subset {

namespace {

constexpr std::size_t kMultiTimes[3] = {600, 783, 926};
constexpr std::size_t kSurgeStart = 280;
constexpr std::size_t kSurgeEnd = 320;
constexpr std::size_t kSurgeVariate = 2;

std::vector<std::size_t> first_k(std::size_t k) {
  std::vector<std::size_t> v(k);
  for (std::size_t i = 0; i < k; ++i) v[i] = i;
  return v;
}

std::vector<std::size_t> set_difference_count(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                                              std::size_t& shared) {
  std::vector<std::size_t> extra;
  shared = 0;
  for (std::size_t x : a) {
    if (std::binary_search(b.begin(), b.end(), x)) {
      ++shared;
    } else {
      extra.push_back(x);
    }
  }
  return extra;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (d < 1 || n < 3) throw InputError("scenario needs d >= 1 and n >= 3");
  std::size_t prev = 0;
  for (const auto& c : changes) {
    if (c.tau < 1 || c.tau >= n) throw InputError("scenario change time outside 1..n-1");
    if (c.tau <= prev) throw InputError("scenario change times must be strictly increasing");
    prev = c.tau;
    for (std::size_t i : c.affected) {
      if (i >= d) throw InputError("scenario affected variate out of range");
    }
  }
  if (kind == ScenarioKind::small_negbin) {
    if (!(r > 0.0)) throw InputError("dispersion must be positive");
    if (!(base_p > 0.0 && base_p < 1.0)) throw InputError("base probability must lie in (0, 1)");
  }
}

std::size_t affected_count(double density, std::size_t d) {
  if (!(density > 0.0 && density <= 1.0)) throw InputError("density must lie in (0, 1]");
  const auto k = static_cast<std::size_t>(std::llround(density * static_cast<double>(d)));
  return std::clamp<std::size_t>(k, 1, d);
}

std::vector<std::string> scenario_names() {
  return {"A", "B", "C", "D", "E", "Aprime", "Bprime", "Cprime", "Dprime"};
}

ScenarioSpec named_scenario(const std::string& name, const ScenarioOptions& o) {
  ScenarioSpec spec;
  spec.name = name;
  spec.n = o.n;
  spec.d = o.d;
  spec.surge = o.surge;
  spec.r = o.r;
  spec.base_p = o.base_p;
  const bool counts = o.model == ModelKind::negbin;
  const double step = counts ? o.delta_p : o.delta;

  std::vector<std::vector<std::size_t>> sets;
  const auto all = first_k(o.d);
  if (name == "A" || name == "B" || name == "C" || name == "D" || name == "E") {
    const auto half_pct = first_k(affected_count(0.005, o.d));
    const auto one_pct = first_k(affected_count(0.01, o.d));
    const auto five_pct = first_k(affected_count(0.05, o.d));
    if (name == "A") sets = {all, all, all};
    if (name == "B") sets = {all, half_pct, all};
    if (name == "C") sets = {half_pct, all, half_pct};
    if (name == "D") sets = {one_pct, one_pct, one_pct};
    if (name == "E") sets = {half_pct, one_pct, five_pct};
    spec.kind = counts ? ScenarioKind::small_negbin : ScenarioKind::multi_gauss;
  } else if (name == "Aprime" || name == "Bprime" || name == "Cprime" || name == "Dprime") {
    if (o.d < 7) throw InputError("primed scenarios need d >= 7 (first and seventh variates)");
    const std::vector<std::size_t> pair{0, 6};
    if (name == "Aprime") sets = {all, all, all};
    if (name == "Bprime") sets = {all, pair, all};
    if (name == "Cprime") sets = {pair, all, pair};
    if (name == "Dprime") sets = {pair, pair, pair};
    spec.kind = counts ? ScenarioKind::small_negbin : ScenarioKind::small_gauss;
  } else {
    std::string valid;
    for (const auto& s : scenario_names()) valid += (valid.empty() ? "" : ", ") + s;
    throw InputError("unknown scenario '" + name + "'; valid names: " + valid);
  }

  if (o.surge) {
    if (o.d <= kSurgeVariate) throw InputError("surge needs at least three variates");
    const double up = counts ? o.delta_p : o.surge_delta;
    spec.changes.push_back({kSurgeStart, {kSurgeVariate}, up});
    spec.changes.push_back({kSurgeEnd, {kSurgeVariate}, -up});
  }
  for (std::size_t k = 0; k < 3; ++k) spec.changes.push_back({kMultiTimes[k], sets[k], step});
  spec.validate();
  return spec;
}

ScenarioSpec amoc_scenario(std::size_t n, std::size_t d, std::size_t tau, double density, double delta) {
  ScenarioSpec spec;
  spec.name = "amoc";
  spec.kind = ScenarioKind::amoc_gauss;
  spec.n = n;
  spec.d = d;
  spec.changes.push_back({tau, first_k(affected_count(density, d)), delta});
  spec.validate();
  return spec;
}

GeneratedData generate(const ScenarioSpec& spec, RandomSource& rng) {
  spec.validate();
  const bool counts = spec.model() == ModelKind::negbin;
  // Per-variate parameter path: level[i] after each change.
  std::vector<std::vector<double>> rows(spec.d, std::vector<double>(spec.n));
  for (std::size_t i = 0; i < spec.d; ++i) {
    double level = counts ? spec.base_p : 0.0;
    std::size_t next = 0;
    for (std::size_t j = 1; j <= spec.n; ++j) {
      while (next < spec.changes.size() && spec.changes[next].tau == j - 1) {
        const auto& c = spec.changes[next];
        if (std::find(c.affected.begin(), c.affected.end(), i) != c.affected.end()) {
          level += counts ? -c.magnitude : c.magnitude;
        }
        ++next;
      }
      if (counts) {
        if (!(level > 0.0 && level < 1.0)) throw InputError("negative binomial p left (0, 1)");
        rows[i][j - 1] = rng.negbin(spec.r, level);
      } else {
        rows[i][j - 1] = level + rng.normal();
      }
    }
  }
  GeneratedData out{make_matrix(std::move(rows)), {}};
  for (const auto& c : spec.changes) {
    if (c.magnitude != 0.0 && !c.affected.empty()) {
      out.truth.taus.push_back(c.tau);
      auto a = c.affected;
      std::sort(a.begin(), a.end());
      out.truth.affected.push_back(std::move(a));
    }
  }
  return out;
}

double MetricsReport::avg_missed() const { return reps ? static_cast<double>(missed) / static_cast<double>(reps) : 0.0; }
double MetricsReport::avg_false_alarms() const {
  return reps ? static_cast<double>(false_alarms) / static_cast<double>(reps) : 0.0;
}
double MetricsReport::rejection_rate() const {
  return reps == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(reps);
}

double MetricsReport::type2_rate() const {
  return true_changes ? static_cast<double>(missed) / static_cast<double>(true_changes) : 0.0;
}
double MetricsReport::affected_tpr() const {
  return affected_total ? static_cast<double>(affected_hits) / static_cast<double>(affected_total) : 0.0;
}
double MetricsReport::affected_fpr() const {
  return unaffected_total ? static_cast<double>(unaffected_flagged) / static_cast<double>(unaffected_total) : 0.0;
}

void MetricsReport::merge(const MetricsReport& o) {
  reps += o.reps;
  rejections += o.rejections;
  missed += o.missed;
  false_alarms += o.false_alarms;
  true_changes += o.true_changes;
  affected_hits += o.affected_hits;
  affected_total += o.affected_total;
  unaffected_flagged += o.unaffected_flagged;
  unaffected_total += o.unaffected_total;
  for (const auto& [tau, count] : o.locations) locations[tau] += count;
  surge_counted = surge_counted || o.surge_counted;
}

MetricsReport evaluate(const SegmentationResult& result, const GroundTruth& truth, std::size_t n, std::size_t d) {
  const std::size_t tol = log_tolerance(n);
  auto near = [tol](std::size_t a, std::size_t b) { return (a > b ? a - b : b - a) <= tol; };

  MetricsReport m;
  m.reps = 1;
  m.rejections = result.detections.empty() ? 0 : 1;
  m.true_changes = truth.taus.size();
  for (const auto& det : result.detections) {
    ++m.locations[det.tau];
    const bool matched = std::any_of(truth.taus.begin(), truth.taus.end(), [&](auto t) { return near(t, det.tau); });
    if (!matched) ++m.false_alarms;
  }
  for (std::size_t k = 0; k < truth.taus.size(); ++k) {
    const std::size_t tau = truth.taus[k];
    const Detection* closest = nullptr;
    bool found = false;
    for (const auto& det : result.detections) {
      if (!near(tau, det.tau)) continue;
      found = true;
      if (det.kind != ChangeKind::sparse) continue;
      const auto dist = [tau](std::size_t x) { return x > tau ? x - tau : tau - x; };
      if (!closest || dist(det.tau) < dist(closest->tau)) closest = &det;
    }
    if (!found) ++m.missed;

    const auto& truth_set = truth.affected[k];
    m.affected_total += truth_set.size();
    m.unaffected_total += d - truth_set.size();
    if (closest) {
      std::size_t shared = 0;
      const auto extra = set_difference_count(closest->affected, truth_set, shared);
      m.affected_hits += shared;
      m.unaffected_flagged += extra.size();
    }
  }
  return m;
}

const char* to_string(Method method) {
  switch (method) {
    case Method::subset: return "subset";
    case Method::mean: return "mean";
    case Method::max: return "max";
    case Method::binweight: return "binweight";
  }
  return "subset";
}

Method method_from_string(const std::string& s) {
  if (s == "subset") return Method::subset;
  if (s == "mean") return Method::mean;
  if (s == "max") return Method::max;
  if (s == "binweight") return Method::binweight;
  throw InputError("unknown method '" + s + "'; valid: subset, mean, max, binweight");
}

SegmentationResult run_detector(const DetectorConfig& config, const TimeSeriesMatrix& data, ModelKind model,
                                RandomSource& interval_rng, Execution exec) {
  const IntervalSet set = draw_intervals(data.length(), config.intervals, interval_rng);
  if (config.method != Method::subset) {
    if (model != ModelKind::gaussian) throw InputError("CUSUM baselines support the Gaussian model only");
    const CostModel cm = config.sigma > 0.0 ? CostModel::gaussian(data, {config.sigma}) : CostModel::gaussian(data);
    return baseline_wbs(cm, config.baseline, set, exec);
  }
  const CostModel cm = model == ModelKind::negbin ? CostModel::negbin(data, config.r_max)
                       : config.sigma > 0.0       ? CostModel::gaussian(data, {config.sigma})
                                                  : CostModel::gaussian(data);
  SegmentationResult raw = subset_wbs(cm, config.penalties, set, exec);
  if (!config.postprocess) return raw;
  return postprocess(cm, config.penalties.alpha, raw, {false, exec});
}

DetectorConfig calibrate_detector(Method method, const ScenarioSpec& spec, double target_fp, std::size_t reps,
                                  std::size_t intervals, const RandomSource& rng, Execution exec) {
  DetectorConfig cfg;
  cfg.method = method;
  cfg.intervals = intervals;
  if (method == Method::subset) {
    CalibrationSpec cs;
    cs.n = spec.n;
    cs.d = spec.d;
    cs.target_fp = target_fp;
    cs.reps = reps;
    cs.intervals = intervals;
    cs.null.kind = spec.model();
    cs.null.r = {spec.r};
    cs.null.p = {spec.base_p};
    cs.null.r_max = cfg.r_max;
    cfg.penalties = calibrate_beta(cs, rng, exec).penalties;
    return cfg;
  }
  if (spec.model() != ModelKind::gaussian) throw InputError("CUSUM baselines support the Gaussian model only");
  BaselineCalibrationSpec bs;
  bs.n = spec.n;
  bs.d = spec.d;
  bs.target_fp = target_fp;
  bs.reps = reps;
  bs.intervals = intervals;
  bs.binweight_alpha = binweight_alpha_for_length(spec.n);
  switch (method) {
    case Method::mean: bs.method = BaselineMethod::mean; break;
    case Method::max: bs.method = BaselineMethod::max; break;
    default: bs.method = BaselineMethod::binweight; break;
  }
  cfg.baseline = calibrate_baseline(bs, rng, exec);
  return cfg;
}

ExperimentResult run_experiment(const ScenarioSpec& spec, const DetectorConfig& detector, std::size_t reps,
                                const RandomSource& rng, Execution exec) {
  if (reps < 1) throw InputError("experiment needs reps >= 1");
  spec.validate();
  ExperimentResult out;
  out.scenario = spec.name;
  out.method = to_string(detector.method);
  out.rows.resize(reps);
  std::vector<MetricsReport> per_rep(reps);

  std::exception_ptr failure;
  std::mutex failure_lock;
  const long long count = static_cast<long long>(reps);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (long long kk = 0; kk < count; ++kk) {
    const auto k = static_cast<std::size_t>(kk);
    try {
      const RandomSource rep = rng.substream(k);
      RandomSource data_rng = rep.substream(0);
      RandomSource interval_rng = rep.substream(1);
      const GeneratedData g = generate(spec, data_rng);
      const SegmentationResult res = run_detector(detector, g.data, spec.model(), interval_rng);
      per_rep[k] = evaluate(res, g.truth, spec.n, spec.d);
      per_rep[k].surge_counted = spec.surge;
      out.rows[k] = {k, rep.stream(), per_rep[k].missed, per_rep[k].false_alarms, per_rep[k].affected_tpr(),
                     per_rep[k].affected_fpr()};
    } catch (...) {
      std::lock_guard<std::mutex> guard(failure_lock);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  for (const auto& m : per_rep) out.summary.merge(m);
  return out;
}

std::vector<double> power_curve(std::size_t n, std::size_t d, std::size_t tau, double density,
                                const std::vector<double>& deltas, const DetectorConfig& detector, std::size_t reps,
                                const RandomSource& rng, PowerRule rule, Execution exec) {
  std::vector<double> power;
  power.reserve(deltas.size());
  for (double delta : deltas) {
    const ScenarioSpec spec = amoc_scenario(n, d, tau, density, delta);
    const ExperimentResult r = run_experiment(spec, detector, reps, rng, exec);
    power.push_back(rule == PowerRule::rejection ? r.summary.rejection_rate() : 1.0 - r.summary.type2_rate());
  }
  return power;
}

void write_experiment_table(std::ostream& os, const ExperimentResult& r) {
  os << "replicate\tstream\tmissed\tfalse_alarms\ttpr\tfpr\n";
  for (const auto& row : r.rows) {
    os << row.replicate << '\t' << row.stream << '\t' << row.missed << '\t' << row.false_alarms << '\t' << row.tpr
       << '\t' << row.fpr << '\n';
  }
  const auto& s = r.summary;
  os << "summary\tscenario=" << r.scenario << "\tmethod=" << r.method << "\treps=" << s.reps
     << "\tavg_missed=" << s.avg_missed() << "\tavg_false_alarms=" << s.avg_false_alarms()
     << "\trejection_rate=" << s.rejection_rate() << "\ttype2_rate=" << s.type2_rate() << "\taffected_tpr=" << s.affected_tpr()
     << "\taffected_fpr=" << s.affected_fpr() << "\tsurge_counted_as_two=" << (s.surge_counted ? "yes" : "no")
     << '\n';
}

}  // namespace subset
