#include <cmath>

#include "doctest.h"
#include "subset/baselines.hpp"
#include "subset/penalties.hpp"
#include "test_support.hpp"

using namespace subset;
using namespace subset::testing;

TEST_CASE("cusum examples") {
  const auto flat = CostModel::gaussian(make_matrix({{3, 3, 3, 3}}), {1.0});
  CHECK(cusum(flat, 0, 1, 4, 2) == doctest::Approx(0.0));
  const auto step = CostModel::gaussian(make_matrix({{0, 0, 2, 2}}), {1.0});
  CHECK(cusum(step, 0, 1, 4, 2) == doctest::Approx(2.0));
  CHECK_THROWS_AS(cusum(step, 0, 1, 4, 4), InputError);
  const auto counts = CostModel::negbin(make_matrix({{1, 2, 3, 4}}));
  CHECK_THROWS_AS(cusum(counts, 0, 1, 4, 2), InputError);
}

TEST_CASE("squared cusum matches the likelihood-ratio gain") {
  const auto rows = gaussian_rows(3, 40, 2);
  const auto model = CostModel::gaussian(make_matrix(rows), {0.8, 1.0, 1.7});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t l = 1; l < 38; l += 5) {
      for (std::size_t u = l + 2; u <= 40; u += 4) {
        for (std::size_t t = l; t < u; ++t) {
          const double w = cusum(model, i, l, u, t);
          CHECK(std::abs(w * w - d_statistic(model, i, l, u, t)) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("aggregation examples") {
  const std::vector<double> w{3.0, 1.0};
  CHECK(baseline_statistic(w, {BaselineMethod::mean, 1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(baseline_statistic(w, {BaselineMethod::max, 4.0, 0.0}) == doctest::Approx(-1.0));
  CHECK(baseline_statistic(w, {BaselineMethod::binweight, 1.0, 2.0}) == doctest::Approx(2.0));
}

TEST_CASE("aggregates are monotone in every component") {
  std::mt19937 gen(4);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (auto m : {BaselineMethod::mean, BaselineMethod::max, BaselineMethod::binweight}) {
    const BaselineConfig cfg{m, 1.0, 1.5};
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> w(5);
      for (auto& v : w) v = u(gen);
      const double before = baseline_statistic(w, cfg);
      w[rep % 5] += u(gen);
      CHECK(baseline_statistic(w, cfg) >= before);
    }
  }
}

TEST_CASE("threshold defaults") {
  CHECK(binweight_alpha_for_length(1000) == doctest::Approx(std::sqrt(2.0 * std::log(1000.0))));
  CHECK(binweight_alpha_for_dims(12) == doctest::Approx(std::sqrt(2.0 * std::log(12.0))));
  CHECK(baseline_method_from_string("binweight") == BaselineMethod::binweight);
  CHECK_THROWS_AS(baseline_method_from_string("inspect"), InputError);
}

TEST_CASE("baseline search reports dense all-variate detections") {
  auto rows = gaussian_rows(5, 200, 6);
  for (auto& r : rows) {
    for (std::size_t j = 120; j < 200; ++j) r[j] += 1.5;
  }
  const auto model = CostModel::gaussian(make_matrix(rows), {1.0});
  RandomSource rng(3);
  const auto iv = draw_intervals(200, 50, rng);
  const BaselineConfig cfg{BaselineMethod::mean, 4.0, 0.0};
  const auto a = baseline_wbs(model, cfg, iv, Execution::serial);
  const auto b = baseline_wbs(model, cfg, iv, Execution::parallel);
  REQUIRE_FALSE(a.detections.empty());
  CHECK(std::abs(static_cast<long>(a.detections[0].tau) - 120) <= 3);
  CHECK(a.detections[0].kind == ChangeKind::dense);
  CHECK(a.detections[0].affected.size() == 5);
  CHECK(a.taus() == b.taus());
}

TEST_CASE("baseline calibration is reproducible") {
  BaselineCalibrationSpec spec;
  spec.method = BaselineMethod::max;
  spec.n = 60;
  spec.d = 5;
  spec.reps = 40;
  spec.intervals = 10;
  const auto a = calibrate_baseline(spec, RandomSource(8), Execution::serial);
  const auto b = calibrate_baseline(spec, RandomSource(8), Execution::parallel);
  CHECK(a.threshold == b.threshold);
  CHECK(a.threshold > 0.0);
}
