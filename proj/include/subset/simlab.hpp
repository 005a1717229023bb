#pragma once

// Simulation scenarios, detector harness and evaluation metrics.
//
// Gaussian scenarios shift the mean of affected variates by +delta at each
// change (cumulative, unit-variance noise). Count scenarios start every
// variate at success probability base_p and subtract delta_p at each change.
// A surge is a pair of changes at 280 and 320 on the third variate that
// returns it to its original level.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "subset/baselines.hpp"
#include "subset/core.hpp"
#include "subset/penalties.hpp"
#include "subset/postprocess.hpp"
#include "subset/wbs.hpp"

namespace subset {

enum class ScenarioKind { amoc_gauss, multi_gauss, small_gauss, small_negbin };

struct PlannedChange {
  std::size_t tau = 0;
  std::vector<std::size_t> affected;  // 0-based
  double magnitude = 0.0;             // mean shift, or decrease in p for counts
};

struct ScenarioSpec {
  std::string name;
  ScenarioKind kind = ScenarioKind::multi_gauss;
  std::size_t n = 1000;
  std::size_t d = 12;
  std::vector<PlannedChange> changes;  // strictly increasing tau
  bool surge = false;
  double r = 20.0;      // counts only
  double base_p = 0.5;  // counts only

  ModelKind model() const { return kind == ScenarioKind::small_negbin ? ModelKind::negbin : ModelKind::gaussian; }
  void validate() const;
};

struct ScenarioOptions {
  std::size_t n = 1000;
  std::size_t d = 12;
  ModelKind model = ModelKind::gaussian;
  double delta = 1.0;        // gaussian shift per change
  double surge_delta = 5.0;  // gaussian surge height
  double delta_p = 0.1;      // count scenarios
  double r = 20.0;
  double base_p = 0.5;
  bool surge = false;
};

/// Valid names: A, B, C, D, E (density-based, any d) and Aprime, Bprime,
/// Cprime, Dprime (first and seventh variates, d >= 7).
ScenarioSpec named_scenario(const std::string& name, const ScenarioOptions& options);
std::vector<std::string> scenario_names();

/// Single change at tau affecting the first max(1, round(density * d)) variates.
ScenarioSpec amoc_scenario(std::size_t n, std::size_t d, std::size_t tau, double density, double delta);

/// Affected variate count for a density: max(1, round(density * d)).
std::size_t affected_count(double density, std::size_t d);

struct GroundTruth {
  std::vector<std::size_t> taus;
  std::vector<std::vector<std::size_t>> affected;
};

struct GeneratedData {
  TimeSeriesMatrix data;
  GroundTruth truth;
};

GeneratedData generate(const ScenarioSpec& spec, RandomSource& rng);

/// Accumulated evaluation tallies; averages are per replicate.
struct MetricsReport {
  std::size_t reps = 0;
  std::size_t rejections = 0;  // replicates with at least one detection
  std::size_t missed = 0;
  std::size_t false_alarms = 0;
  std::size_t true_changes = 0;
  std::size_t affected_hits = 0;        // true affected variates recovered
  std::size_t affected_total = 0;       // true affected variates
  std::size_t unaffected_flagged = 0;   // unaffected variates reported
  std::size_t unaffected_total = 0;
  std::map<std::size_t, std::size_t> locations;  // estimated tau -> count
  bool surge_counted = false;  // surge pair counted as two true changes

  double avg_missed() const;
  double avg_false_alarms() const;
  double rejection_rate() const;
  double type2_rate() const;  // missed / true changes
  double affected_tpr() const;
  double affected_fpr() const;

  void merge(const MetricsReport& other);
};

/// Matching uses a window of ceil(ln n) on either side. Affected-set rates use
/// the nearest sparse-labelled detection within the window; a true change
/// without one recovers no variates and flags none.
MetricsReport evaluate(const SegmentationResult& result, const GroundTruth& truth, std::size_t n, std::size_t d);

enum class Method { subset, mean, max, binweight };

const char* to_string(Method method);
Method method_from_string(const std::string& s);

struct DetectorConfig {
  Method method = Method::subset;
  PenaltyConfig penalties;
  BaselineConfig baseline;
  std::size_t intervals = 200;  // 0 = single scan of (1, n)
  bool postprocess = true;
  double sigma = 1.0;  // gaussian; <= 0 estimates from the data
  double r_max = kDefaultDispersionCap;
};

SegmentationResult run_detector(const DetectorConfig& config, const TimeSeriesMatrix& data, ModelKind model,
                                RandomSource& interval_rng, Execution exec = Execution::serial);

/// Null-calibrated detector for the scenario's (n, d, model).
DetectorConfig calibrate_detector(Method method, const ScenarioSpec& spec, double target_fp, std::size_t reps,
                                  std::size_t intervals, const RandomSource& rng, Execution exec = Execution::parallel);

struct ReplicateRow {
  std::size_t replicate = 0;
  std::uint64_t stream = 0;
  std::size_t missed = 0;
  std::size_t false_alarms = 0;
  double tpr = 0.0;
  double fpr = 0.0;
};

struct ExperimentResult {
  std::string scenario;
  std::string method;
  MetricsReport summary;
  std::vector<ReplicateRow> rows;
};

/// Replicate k draws data and intervals from rng.substream(k).
ExperimentResult run_experiment(const ScenarioSpec& spec, const DetectorConfig& detector, std::size_t reps,
                                const RandomSource& rng, Execution exec = Execution::parallel);

/// rejection: any change reported. localised: a change reported within
/// ceil(ln n) of tau.
enum class PowerRule { rejection, localised };

/// Power at each delta for a single change at tau. Every delta reuses the
/// same replicate streams.
std::vector<double> power_curve(std::size_t n, std::size_t d, std::size_t tau, double density,
                                const std::vector<double>& deltas, const DetectorConfig& detector, std::size_t reps,
                                const RandomSource& rng, PowerRule rule = PowerRule::rejection,
                                Execution exec = Execution::parallel);

void write_experiment_table(std::ostream& os, const ExperimentResult& result);

}  // namespace subset
