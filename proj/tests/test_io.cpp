#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "subset/io.hpp"
#include "subset/simlab.hpp"
#include "test_support.hpp"

using namespace subset;
using namespace subset::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path p = fs::temp_directory_path() / "subset_io_tests";
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SUBSET_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_panel(const fs::path& p, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(p);
  out << "time";
  for (std::size_t i = 0; i < rows.size(); ++i) out << ",R" << i + 1;
  out << '\n';
  for (std::size_t j = 0; j < rows[0].size(); ++j) {
    out << "t" << j + 1;
    for (const auto& r : rows) out << ',' << r[j];
    out << '\n';
  }
}

}  // namespace

TEST_CASE("csv shape and labels") {
  std::stringstream ss;
  ss << "month";
  for (int i = 1; i <= 12; ++i) ss << ",region" << i;
  ss << '\n';
  for (int j = 0; j < 564; ++j) {
    ss << "m" << j;
    for (int i = 0; i < 12; ++i) ss << ',' << (i + j) % 7;
    ss << '\n';
  }
  const auto m = parse_csv(ss);
  CHECK(m.dims() == 12);
  CHECK(m.length() == 564);
  CHECK(m.variate_names()[0] == "region1");
  CHECK(m.time_labels()[563] == "m563");
  CHECK(m.at(2, 1) == 2.0);

  std::stringstream back;
  write_csv(back, m);
  CHECK(parse_csv(back) == m);
}

TEST_CASE("csv errors") {
  std::stringstream header_only("time,a,b\n");
  CHECK_THROWS_AS(parse_csv(header_only), InputError);
  std::stringstream na("time,a,b\n1,2,3\n2,NA,4\n");
  CHECK_THROWS_WITH_AS(parse_csv(na), doctest::Contains("row 3, column 2"), InputError);
  std::stringstream dup("time,a,a\n1,2,3\n2,3,4\n");
  CHECK_THROWS_WITH_AS(parse_csv(dup), doctest::Contains("duplicate"), InputError);
  std::stringstream short_row("time,a,b\n1,2,3\n2,3\n");
  CHECK_THROWS_AS(parse_csv(short_row), InputError);
  CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), InputError);
}

TEST_CASE("report round trip") {
  AnalysisReport r;
  r.n = 564;
  r.d = 3;
  r.model = ModelKind::negbin;
  r.penalties = theoretical_penalties(564, 3);
  r.seed = 42;
  r.intervals = 1000;
  r.detections.push_back({120, "Jan 1980", ChangeKind::sparse, {"a"}, 12.5});
  r.detections.push_back({300, "Jan 1995", ChangeKind::dense, {"a", "b", "c"}, 99.25});
  r.mean_residual_correlation = 0.063;
  CHECK(report_from_json(report_to_json(r)) == r);
  r.mean_residual_correlation.reset();
  CHECK(report_from_json(nlohmann::json::parse(report_to_json(r).dump())) == r);
  CHECK(pairs_csv(r).find("300,Jan 1995,c") != std::string::npos);
  CHECK_THROWS_AS(report_from_json(nlohmann::json::parse("{\"n\": 3}")), InputError);
}

TEST_CASE("residual correlations") {
  const auto rows = gaussian_rows(2, 10000, 31);
  auto three = rows;
  three.push_back(rows[0]);
  const auto data = make_matrix(three);
  const auto model = CostModel::gaussian(data, {1.0});
  const auto c = pearson_residual_correlations(data, SegmentationResult{}, model);
  CHECK(c.matrix[0][0] == doctest::Approx(1.0));
  CHECK(c.matrix[0][2] == doctest::Approx(1.0));
  CHECK(std::abs(c.matrix[0][1]) < 0.05);

  const auto flat = make_matrix({{1, 1, 1, 1}, {1, 2, 3, 4}});
  CHECK_THROWS_AS(pearson_residual_correlations(flat, SegmentationResult{}, CostModel::gaussian(flat, {1.0})),
                  NumericalError);
}

TEST_CASE("negbin residuals are standardised under the true segmentation") {
  ScenarioOptions o;
  o.model = ModelKind::negbin;
  o.n = 4000;
  o.d = 3;
  o.delta_p = 0.1;
  auto spec = named_scenario("A", o);
  RandomSource rng(12);
  const auto g = generate(spec, rng);
  SegmentationResult truth;
  for (std::size_t k = 0; k < g.truth.taus.size(); ++k) {
    truth.detections.push_back(Detection{g.truth.taus[k], ChangeKind::dense, g.truth.affected[k], 1.0, {1, 4000}});
  }
  const auto model = CostModel::negbin(g.data, kDefaultDispersionCap, {20.0});
  const auto res = pearson_residuals(g.data, truth, model);
  for (const auto& r : res) {
    double m = 0.0, v = 0.0;
    for (double x : r) m += x;
    m /= static_cast<double>(r.size());
    for (double x : r) v += (x - m) * (x - m);
    v /= static_cast<double>(r.size() - 1);
    CHECK(std::abs(m) < 0.1);
    CHECK(std::abs(v - 1.0) < 0.1);
  }
}

TEST_CASE("detect pipeline warns on counts under the gaussian model") {
  const auto data = make_matrix(count_rows(3, 150, 5, 2, 0.2));
  DetectOptions o;
  o.model = ModelKind::gaussian;
  o.calib_reps = 40;
  o.intervals = 30;
  const auto out = run_detect(data, o);
  bool warned = false;
  for (const auto& w : out.warnings) warned = warned || w == "over-dispersed counts; negbin recommended";
  CHECK(warned);
  for (const auto& det : out.report.detections) CHECK_FALSE(det.affected.empty());
}

TEST_CASE("command line exit codes and determinism") {
  const fs::path dir = scratch_dir();
  auto rows = count_rows(4, 120, 9);
  for (auto& r : rows) {
    for (std::size_t j = 70; j < 120; ++j) r[j] += 12.0;
  }
  write_panel(dir / "panel.csv", rows);
  const std::string base = "detect --input " + (dir / "panel.csv").string() + " --calib-reps 40 --intervals 50 --seed 7";

  CHECK(run_cli(base + " --output " + (dir / "a.json").string()) == 0);
  CHECK(run_cli(base + " --output " + (dir / "b.json").string()) == 0);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK(fs::exists(dir / "a.json.pairs.csv"));
  const auto report = report_from_json(nlohmann::json::parse(slurp(dir / "a.json")));
  CHECK(report.n == 120);
  CHECK_FALSE(report.detections.empty());

  CHECK(run_cli("detect --input /nonexistent.csv --output " + (dir / "c.json").string()) == 1);
  CHECK(run_cli(base + " --alpha 1 --output " + (dir / "c.json").string()) == 1);
  CHECK(run_cli("simulate --scenario Z --reps 1") == 1);
  CHECK(run_cli("frobnicate") == 1);

  std::vector<std::vector<double>> zeros(2, std::vector<double>(50, 0.0));
  zeros[1][3] = 4.0;
  write_panel(dir / "zeros.csv", zeros);
  CHECK(run_cli("detect --input " + (dir / "zeros.csv").string() + " --output " + (dir / "z.json").string()) == 2);
}
