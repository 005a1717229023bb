#include "subset/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "subset/postprocess.hpp"
#include "subset/wbs.hpp"

namespace subset {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? comma : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw InputError("non-numeric cell '" + cell + "' at row " + std::to_string(row) + ", column " +
                     std::to_string(col));
  }
  return v;
}

// Segment boundaries for variate i: detections that list it as affected.
std::vector<std::size_t> variate_splits(const SegmentationResult& result, std::size_t i) {
  std::vector<std::size_t> out;
  for (const auto& det : result.detections) {
    for (std::size_t a : det.affected) {
      if (a == i) {
        out.push_back(det.tau);
        break;
      }
    }
  }
  return out;
}

}  // namespace

TimeSeriesMatrix parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw InputError("missing header row");
  const auto header = split_row(line);
  if (header.size() < 2) throw InputError("header needs a time column and at least one variate");
  std::vector<std::string> names(header.begin() + 1, header.end());
  std::set<std::string> seen;
  for (const auto& name : names) {
    if (name.empty()) throw InputError("empty variate name in header");
    if (!seen.insert(name).second) throw InputError("duplicate variate name '" + name + "'");
  }

  std::vector<std::vector<double>> rows(names.size());
  std::vector<std::string> labels;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw InputError("row " + std::to_string(row) + " has " + std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    }
    labels.push_back(cells[0]);
    for (std::size_t c = 1; c < cells.size(); ++c) rows[c - 1].push_back(parse_cell(cells[c], row, c + 1));
  }
  if (labels.size() < 2) throw InputError("need at least 2 data rows");
  return TimeSeriesMatrix(std::move(rows), std::move(names), std::move(labels));
}

TimeSeriesMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file " + path.string());
  return parse_csv(in);
}

void write_csv(std::ostream& out, const TimeSeriesMatrix& data) {
  out << "time";
  for (const auto& name : data.variate_names()) out << ',' << name;
  out << '\n';
  out.precision(17);
  for (std::size_t j = 1; j <= data.length(); ++j) {
    out << (data.has_time_labels() ? data.time_labels()[j - 1] : std::to_string(j));
    for (std::size_t i = 0; i < data.dims(); ++i) out << ',' << data.at(i, j);
    out << '\n';
  }
}

std::vector<std::vector<double>> pearson_residuals(const TimeSeriesMatrix& data, const SegmentationResult& result,
                                                   const CostModel& model) {
  const std::size_t n = data.length();
  std::vector<std::vector<double>> res(data.dims(), std::vector<double>(n));
  for (std::size_t i = 0; i < data.dims(); ++i) {
    auto splits = variate_splits(result, i);
    splits.push_back(n);
    std::size_t start = 1;
    for (std::size_t end : splits) {
      double mean = 0.0;
      for (std::size_t j = start; j <= end; ++j) mean += data.at(i, j);
      mean /= static_cast<double>(end - start + 1);
      for (std::size_t j = start; j <= end; ++j) {
        const double y = data.at(i, j);
        double scale = 0.0;
        if (model.kind() == ModelKind::gaussian) {
          scale = model.sigma()[i];
        } else {
          scale = std::sqrt(mean * (1.0 + mean / model.dispersion()[i]));
        }
        res[i][j - 1] = scale > 0.0 ? (y - mean) / scale : 0.0;
      }
      start = end + 1;
    }
  }
  return res;
}

CorrelationSummary pearson_residual_correlations(const TimeSeriesMatrix& data, const SegmentationResult& result,
                                                 const CostModel& model) {
  const auto res = pearson_residuals(data, result, model);
  const std::size_t d = res.size();
  const double n = static_cast<double>(data.length());
  std::vector<double> mean(d, 0.0);
  std::vector<double> sd(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (double v : res[i]) mean[i] += v;
    mean[i] /= n;
    for (double v : res[i]) sd[i] += (v - mean[i]) * (v - mean[i]);
    sd[i] = std::sqrt(sd[i]);
    if (!(sd[i] > 0.0)) {
      throw NumericalError("zero-variance residual series for variate '" + data.variate_names()[i] + "'");
    }
  }
  CorrelationSummary out;
  out.matrix.assign(d, std::vector<double>(d, 1.0));
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a + 1; b < d; ++b) {
      double cross = 0.0;
      for (std::size_t j = 0; j < res[a].size(); ++j) cross += (res[a][j] - mean[a]) * (res[b][j] - mean[b]);
      const double c = cross / (sd[a] * sd[b]);
      out.matrix[a][b] = out.matrix[b][a] = c;
      total += c;
      ++pairs;
    }
  }
  out.mean_off_diagonal = pairs ? total / static_cast<double>(pairs) : 0.0;
  return out;
}

nlohmann::json report_to_json(const AnalysisReport& r) {
  nlohmann::json j;
  j["n"] = r.n;
  j["d"] = r.d;
  j["model"] = to_string(r.model);
  j["penalties"] = {{"alpha", r.penalties.alpha},
                    {"beta", r.penalties.beta},
                    {"K", r.penalties.K},
                    {"source", to_string(r.penalties.source)},
                    {"target_fp", r.penalties.target_fp},
                    {"calib_reps", r.penalties.calib_reps}};
  j["seed"] = r.seed;
  j["intervals"] = r.intervals;
  j["detections"] = nlohmann::json::array();
  for (const auto& det : r.detections) {
    j["detections"].push_back({{"tau", det.tau},
                               {"time_label", det.time_label},
                               {"kind", to_string(det.kind)},
                               {"affected", det.affected},
                               {"statistic", det.statistic}});
  }
  j["diagnostics"] = {{"mean_residual_correlation", nullptr}};
  if (r.mean_residual_correlation) j["diagnostics"]["mean_residual_correlation"] = *r.mean_residual_correlation;
  return j;
}

AnalysisReport report_from_json(const nlohmann::json& j) {
  try {
    AnalysisReport r;
    r.n = j.at("n").get<std::size_t>();
    r.d = j.at("d").get<std::size_t>();
    r.model = model_kind_from_string(j.at("model").get<std::string>());
    const auto& p = j.at("penalties");
    r.penalties.alpha = p.at("alpha").get<double>();
    r.penalties.beta = p.at("beta").get<double>();
    r.penalties.K = p.at("K").get<double>();
    r.penalties.source = penalty_source_from_string(p.at("source").get<std::string>());
    r.penalties.target_fp = p.value("target_fp", 0.0);
    r.penalties.calib_reps = p.value("calib_reps", std::size_t{0});
    r.seed = j.at("seed").get<std::uint64_t>();
    r.intervals = j.at("intervals").get<std::size_t>();
    for (const auto& det : j.at("detections")) {
      ReportDetection out;
      out.tau = det.at("tau").get<std::size_t>();
      out.time_label = det.at("time_label").get<std::string>();
      out.kind = change_kind_from_string(det.at("kind").get<std::string>());
      out.affected = det.at("affected").get<std::vector<std::string>>();
      out.statistic = det.at("statistic").get<double>();
      r.detections.push_back(std::move(out));
    }
    const auto& corr = j.at("diagnostics").at("mean_residual_correlation");
    if (!corr.is_null()) r.mean_residual_correlation = corr.get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

AnalysisReport make_report(const TimeSeriesMatrix& data, const SegmentationResult& result,
                           std::optional<double> mean_residual_correlation) {
  AnalysisReport r;
  r.n = data.length();
  r.d = data.dims();
  r.model = result.model;
  r.penalties = result.penalties;
  r.seed = result.seed;
  r.intervals = result.n_intervals;
  for (const auto& det : result.detections) {
    ReportDetection out;
    out.tau = det.tau;
    out.time_label = data.has_time_labels() ? data.time_labels()[det.tau - 1] : std::to_string(det.tau);
    out.kind = det.kind;
    for (std::size_t i : det.affected) out.affected.push_back(data.variate_names()[i]);
    out.statistic = det.statistic;
    r.detections.push_back(std::move(out));
  }
  r.mean_residual_correlation = mean_residual_correlation;
  return r;
}

std::string pairs_csv(const AnalysisReport& report) {
  std::ostringstream os;
  os << "tau,time_label,variate\n";
  for (const auto& det : report.detections) {
    for (const auto& name : det.affected) os << det.tau << ',' << det.time_label << ',' << name << '\n';
  }
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw InputError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

DetectOutcome run_detect(const TimeSeriesMatrix& data, const DetectOptions& o) {
  DetectOutcome out;
  const std::size_t d = data.dims();
  const std::size_t n = data.length();

  if (o.model == ModelKind::gaussian && data.is_count_data()) {
    for (std::size_t i = 0; i < d; ++i) {
      auto row = data.row(i);
      double mean = 0.0;
      for (double v : row) mean += v;
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (double v : row) var += (v - mean) * (v - mean);
      var /= static_cast<double>(n - 1);
      if (var > mean) {
        out.warnings.push_back("over-dispersed counts; negbin recommended");
        break;
      }
    }
  }

  const CostModel model =
      o.model == ModelKind::negbin ? CostModel::negbin(data, o.r_max) : CostModel::gaussian(data, o.sigma);

  PenaltyConfig penalties;
  if (o.manual) {
    penalties = *o.manual;
    penalties.source = PenaltySource::manual;
    penalties.validate();
  } else {
    CalibrationSpec cs;
    cs.n = n;
    cs.d = d;
    cs.target_fp = o.target_fp;
    cs.reps = o.calib_reps;
    cs.intervals = o.intervals;
    cs.null.kind = o.model;
    cs.null.sigma = 1.0;
    cs.null.r = {o.null_r};
    cs.null.p = {o.null_p};
    cs.null.r_max = o.r_max;
    penalties = calibrate_beta(cs, RandomSource(o.seed, 1)).penalties;
  }

  RandomSource interval_rng(o.seed, 2);
  const IntervalSet set = draw_intervals(n, o.intervals, interval_rng);
  SegmentationResult result = subset_wbs(model, penalties, set, Execution::parallel);
  if (o.postprocess) result = postprocess(model, penalties.alpha, result, {false, Execution::parallel});
  result.seed = o.seed;

  std::optional<double> mean_corr;
  if (d >= 2) {
    try {
      mean_corr = pearson_residual_correlations(data, result, model).mean_off_diagonal;
    } catch (const NumericalError& e) {
      out.warnings.push_back(std::string("residual diagnostics skipped: ") + e.what());
    }
  }
  out.report = make_report(data, result, mean_corr);
  out.result = std::move(result);
  return out;
}

}  // namespace subset
