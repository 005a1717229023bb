// Command-line front end: detect, simulate, calibrate, benchmark.
//
// Exit codes: 0 success, 1 input error, 2 numerical failure.

#include <algorithm>
#include <optional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "subset/baselines.hpp"
#include "subset/io.hpp"
#include "subset/penalties.hpp"
#include "subset/simlab.hpp"

namespace {

using namespace subset;

struct SimFlags {
  std::string scenario = "Aprime";
  std::string model = "gaussian";
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::size_t n = 1000;
  std::size_t d = 12;
  double delta = 1.0;
  double delta_p = 0.1;
  double r = 20.0;
  bool surge = false;
  std::size_t intervals = 200;
  double fp = 0.05;
  std::size_t calib_reps = 200;
  std::string output;
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--scenario", f.scenario, "A, B, C, D, E, Aprime, Bprime, Cprime or Dprime");
  cmd->add_option("--model", f.model, "gaussian or negbin")->check(CLI::IsMember({"gaussian", "negbin"}));
  cmd->add_option("--reps", f.reps, "replicates")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--n", f.n, "series length");
  cmd->add_option("--d", f.d, "number of variates");
  cmd->add_option("--delta", f.delta, "gaussian mean shift per change");
  cmd->add_option("--delta-p", f.delta_p, "count scenarios: decrease in success probability");
  cmd->add_option("--r", f.r, "count scenarios: dispersion");
  cmd->add_flag("--surge", f.surge, "add the epidemic surge on the third variate");
  cmd->add_option("--intervals", f.intervals, "random WBS intervals (0 = binary segmentation)");
  cmd->add_option("--fp", f.fp, "target false-alarm rate for calibration");
  cmd->add_option("--calib-reps", f.calib_reps, "null replicates for calibration");
  cmd->add_option("--output", f.output, "write the per-replicate table here instead of stdout");
}

ScenarioSpec scenario_from(const SimFlags& f) {
  ScenarioOptions o;
  o.n = f.n;
  o.d = f.d;
  o.model = model_kind_from_string(f.model);
  o.delta = f.delta;
  o.delta_p = f.delta_p;
  o.r = f.r;
  o.surge = f.surge;
  return named_scenario(f.scenario, o);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_simulate(const SimFlags& f, const std::string& method_name) {
  const ScenarioSpec spec = scenario_from(f);
  const Method method = method_from_string(method_name);
  const RandomSource root(f.seed);
  const DetectorConfig det = calibrate_detector(method, spec, f.fp, f.calib_reps, f.intervals, root.substream(0));
  const ExperimentResult res = run_experiment(spec, det, f.reps, root.substream(1));
  std::ostringstream table;
  table << std::setprecision(6);
  write_experiment_table(table, res);
  if (f.output.empty()) {
    std::cout << table.str();
  } else {
    write_atomic(f.output, table.str());
    std::cout << table.str().substr(table.str().rfind("summary"));
  }
  return 0;
}

int run_benchmark(const SimFlags& f, const std::string& methods) {
  const ScenarioSpec spec = scenario_from(f);
  const RandomSource root(f.seed);
  std::cout << "scenario\tmethod\tavg_missed\tavg_false_alarms\n";
  for (const auto& name : split_list(methods)) {
    const Method method = method_from_string(name);
    const DetectorConfig det = calibrate_detector(method, spec, f.fp, f.calib_reps, f.intervals, root.substream(0));
    // Same replicate streams for every method.
    const ExperimentResult res = run_experiment(spec, det, f.reps, root.substream(1));
    std::cout << spec.name << (spec.surge ? "+surge" : "") << '\t' << name << '\t' << std::fixed
              << std::setprecision(2) << res.summary.avg_missed() << '\t' << res.summary.avg_false_alarms() << '\n';
    std::cout.unsetf(std::ios::fixed);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate changepoint detection with sparse and dense penalties"};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "segment a CSV panel and write a JSON report");
  std::string input, output, model = "negbin", sigma_list;
  std::optional<double> alpha, beta, K;
  subset::DetectOptions dopt;
  bool no_post = false;
  detect->add_option("--input", input, "CSV: time,<name1>,...")->required();
  detect->add_option("--model", model, "gaussian or negbin")->check(CLI::IsMember({"gaussian", "negbin"}));
  auto* a_opt = detect->add_option("--alpha", alpha, "manual alpha");
  auto* b_opt = detect->add_option("--beta", beta, "manual beta");
  auto* k_opt = detect->add_option("--K", K, "manual K");
  detect->add_option("--fp", dopt.target_fp, "target false-alarm rate (default 0.05)");
  detect->add_option("--calib-reps", dopt.calib_reps, "null replicates for calibration (default 200)");
  detect->add_option("--intervals", dopt.intervals, "random WBS intervals (default 1000)");
  detect->add_option("--seed", dopt.seed, "seed for calibration and intervals");
  detect->add_option("--sigma", sigma_list, "gaussian: one sigma, or a comma list with one per variate");
  detect->add_option("--rmax", dopt.r_max, "dispersion cap (default 10000)");
  detect->add_option("--null-r", dopt.null_r, "count calibration null dispersion (default 20)");
  detect->add_option("--null-p", dopt.null_p, "count calibration null success probability (default 0.5)");
  detect->add_option("--output", output, "report path (JSON); pairs CSV goes to <output>.pairs.csv")->required();
  detect->add_flag("--no-postprocess", no_post, "skip the per-variate affected-set refit");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a named scenario and report missed / false alarms");
  SimFlags sim;
  std::string sim_method = "subset";
  add_sim_flags(simulate, sim);
  simulate->add_option("--method", sim_method, "subset, mean, max or binweight");

  // calibrate
  auto* calibrate = app.add_subcommand("calibrate", "Monte Carlo beta for a target false-alarm rate");
  subset::CalibrationSpec cal;
  std::string cal_model = "gaussian";
  std::uint64_t cal_seed = 1;
  std::size_t retest = 0;
  double cal_r = 20.0, cal_p = 0.5;
  cal.reps = 500;
  calibrate->add_option("--n", cal.n, "series length")->required();
  calibrate->add_option("--d", cal.d, "number of variates")->required();
  calibrate->add_option("--fp", cal.target_fp, "target false-alarm rate");
  calibrate->add_option("--reps", cal.reps, "null replicates");
  calibrate->add_option("--intervals", cal.intervals, "random WBS intervals (0 = single scan)");
  calibrate->add_option("--model", cal_model, "gaussian or negbin")->check(CLI::IsMember({"gaussian", "negbin"}));
  calibrate->add_option("--r", cal_r, "negbin null dispersion");
  calibrate->add_option("--p", cal_p, "negbin null success probability");
  calibrate->add_option("--seed", cal_seed, "seed");
  calibrate->add_option("--retest", retest, "fresh null replicates used to check the achieved rate");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "compare detectors on a named scenario");
  SimFlags bflags;
  std::string methods = "subset,mean,max,binweight";
  add_sim_flags(bench, bflags);
  bench->add_option("--methods", methods, "comma list of subset, mean, max, binweight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*detect) {
      const int manual = static_cast<int>(a_opt->count() > 0) + static_cast<int>(b_opt->count() > 0) +
                         static_cast<int>(k_opt->count() > 0);
      if (manual != 0 && manual != 3) throw InputError("--alpha, --beta and --K must be given together");
      if (manual == 3) {
        PenaltyConfig p;
        p.alpha = *alpha;
        p.beta = *beta;
        p.K = *K;
        p.source = PenaltySource::manual;
        dopt.manual = p;
      }
      dopt.model = model_kind_from_string(model);
      dopt.postprocess = !no_post;
      for (const auto& s : split_list(sigma_list)) {
        try {
          dopt.sigma.push_back(std::stod(s));
        } catch (const std::exception&) {
          throw InputError("--sigma: not a number: " + s);
        }
      }
      const TimeSeriesMatrix data = read_csv(input);
      const DetectOutcome out = run_detect(data, dopt);
      for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
      write_atomic(output, report_to_json(out.report).dump(2) + "\n");
      write_atomic(output + ".pairs.csv", pairs_csv(out.report));
      std::cout << "detections: " << out.report.detections.size() << " (beta=" << out.report.penalties.beta
                << ", source=" << to_string(out.report.penalties.source) << ")\n";
      return 0;
    }
    if (*simulate) return run_simulate(sim, sim_method);
    if (*bench) return run_benchmark(bflags, methods);
    if (*calibrate) {
      cal.null.kind = model_kind_from_string(cal_model);
      cal.null.r = {cal_r};
      cal.null.p = {cal_p};
      const RandomSource root(cal_seed);
      const CalibrationResult res = calibrate_beta(cal, root.substream(0));
      std::cout << std::setprecision(10) << "alpha\t" << res.penalties.alpha << "\nbeta\t" << res.penalties.beta
                << "\nK\t" << res.penalties.K << '\n';
      if (retest > 0) {
        CalibrationSpec fresh = cal;
        fresh.reps = std::max<std::size_t>(retest, 20);
        const CalibrationResult check = calibrate_beta(fresh, root.substream(1));
        std::size_t alarms = 0;
        for (double b : check.minimal_betas) alarms += b > res.penalties.beta ? 1 : 0;
        std::cout << "retest_false_alarm_rate\t"
                  << static_cast<double>(alarms) / static_cast<double>(check.minimal_betas.size()) << '\n';
      }
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
