#include <cmath>

#include "doctest.h"
#include "subset/single_change.hpp"
#include "test_support.hpp"

using namespace subset;
using namespace subset::testing;

namespace {

PenaltyConfig make_pen(double alpha, double beta, double K) {
  PenaltyConfig p;
  p.alpha = alpha;
  p.beta = beta;
  p.K = K;
  p.source = PenaltySource::manual;
  return p;
}

double direct_d(const std::vector<double>& y, std::size_t l, std::size_t u, std::size_t t, double sigma) {
  return direct_rss(y, l, u, sigma) - direct_rss(y, l, t, sigma) - direct_rss(y, t + 1, u, sigma);
}

}  // namespace

TEST_CASE("d_statistic examples") {
  const auto flat = CostModel::gaussian(make_matrix({{0, 0, 0, 0}}), {1.0});
  for (std::size_t t = 1; t < 4; ++t) CHECK(d_statistic(flat, 0, 1, 4, t) == 0.0);
  const auto step = CostModel::gaussian(make_matrix({{0, 0, 2, 2}}), {1.0});
  CHECK(d_statistic(step, 0, 1, 4, 2) == doctest::Approx(4.0));
  CHECK_THROWS_AS(d_statistic(step, 0, 1, 4, 4), InputError);
  CHECK_THROWS_AS(d_statistic(step, 0, 2, 4, 1), InputError);
}

TEST_CASE("D equals the squared CUSUM") {
  const auto rows = gaussian_rows(2, 50, 17);
  const auto model = CostModel::gaussian(make_matrix(rows), {1.5});
  for (std::size_t l = 1; l <= 45; l += 4) {
    for (std::size_t u = l + 2; u <= 50; u += 3) {
      for (std::size_t t = l; t < u; ++t) {
        const double w = direct_cusum(rows[1], l, u, t, 1.5);
        CHECK(std::abs(d_statistic(model, 1, l, u, t) - w * w) < 1e-9);
      }
    }
  }
}

TEST_CASE("aggregation at a fixed split") {
  const double alpha = 2.0 * std::log(2.0);
  const auto pen = make_pen(alpha, 4.0, 4.0 + 2.0 + 4.0);
  const std::vector<double> gains{9.0, 0.25};
  const BranchValues b = aggregate_gains(gains, pen);
  CHECK(b.sparse == doctest::Approx(3.6137).epsilon(1e-4));
  CHECK(b.dense == doctest::Approx(-0.75));
  CHECK(b.kind() == ChangeKind::sparse);
  CHECK(b.value() == doctest::Approx(3.6137).epsilon(1e-4));
}

TEST_CASE("sparse label wins an exact branch tie") {
  const auto pen = make_pen(0.0, 1.0, 1.0);
  const std::vector<double> gains{2.0, 3.0};
  const BranchValues b = aggregate_gains(gains, pen);
  CHECK(b.sparse == b.dense);
  CHECK(b.kind() == ChangeKind::sparse);
}

TEST_CASE("soft thresholding equals the best subset") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0.0, 12.0);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t d = 1 + rep % 10;
    std::vector<double> gains(d);
    for (auto& g : gains) g = u(gen);
    const double alpha = 0.5 + u(gen) / 4.0;
    const double beta = u(gen);
    const auto pen = make_pen(alpha, beta, beta + u(gen) * 2.0);
    const auto [best, mask] = brute_force_subset(gains, pen.alpha, pen.beta, pen.K);
    CHECK(aggregate_gains(gains, pen).value() == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("scan matches exhaustive search over splits and subsets") {
  for (unsigned seed = 0; seed < 40; ++seed) {
    const std::size_t d = 3, n = 20;
    auto rows = gaussian_rows(d, n, 300 + seed);
    for (std::size_t j = 12; j < n; ++j) rows[seed % d][j] += 2.5;
    const auto model = CostModel::gaussian(make_matrix(rows), {1.0});
    const auto pen = make_pen(2.0 * std::log(3.0), 3.0, 3.0 + 3.0 + std::sqrt(18.0));

    double best = -1e300;
    std::size_t best_t = 0;
    for (std::size_t t = 1; t < n; ++t) {
      std::vector<double> g(d);
      for (std::size_t i = 0; i < d; ++i) g[i] = direct_d(rows[i], 1, n, t, 1.0);
      const double v = brute_force_subset(g, pen.alpha, pen.beta, pen.K).first;
      if (v > best + 1e-12) {
        best = v;
        best_t = t;
      }
    }
    const auto c = scan_interval(model, pen, {1, n});
    if (best <= 0.0) {
      CHECK_FALSE(c.has_value());
      continue;
    }
    REQUIRE(c.has_value());
    CHECK(c->tau == best_t);
    CHECK(c->statistic == doctest::Approx(best).epsilon(1e-9));
    if (c->kind == ChangeKind::sparse) {
      std::vector<std::size_t> expect;
      for (std::size_t i = 0; i < d; ++i) {
        if (direct_d(rows[i], 1, n, c->tau, 1.0) > pen.alpha) expect.push_back(i);
      }
      CHECK(c->affected == expect);
    } else {
      CHECK(c->affected == std::vector<std::size_t>{0, 1, 2});
    }
  }
}

TEST_CASE("huge beta gives no candidate") {
  const auto model = CostModel::gaussian(make_matrix(gaussian_rows(4, 60, 1)), {1.0});
  const auto pen = make_pen(2.0 * std::log(4.0), 1e6, 1e6 + 4.0 + std::sqrt(8e6));
  CHECK_FALSE(scan_interval(model, pen, {1, 60}).has_value());
}

TEST_CASE("interval guard") {
  const auto model = CostModel::gaussian(make_matrix(gaussian_rows(2, 10, 1)), {1.0});
  const auto pen = make_pen(1.0, 1.0, 5.0);
  CHECK_THROWS_WITH_AS(scan_interval(model, pen, {3, 4}), doctest::Contains("too short"), InputError);
  CHECK_THROWS_AS(scan_interval(model, pen, {3, 11}), InputError);
}

TEST_CASE("kernel, reference and parallel scan agree") {
  auto rows = gaussian_rows(15, 120, 8);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 70; j < 120; ++j) rows[i][j] += 1.2;
  }
  const auto model = CostModel::gaussian(make_matrix(rows), {1.0});
  const auto pen = make_pen(2.0 * std::log(15.0), 6.0, 6.0 + 15.0 + std::sqrt(180.0));
  for (Interval iv : {Interval{1, 120}, Interval{30, 100}, Interval{60, 80}, Interval{1, 3}}) {
    const auto a = scan_interval(model, pen, iv, Execution::serial);
    const auto b = scan_interval(model, pen, iv, Execution::parallel);
    const auto r = scan_interval_reference(model, pen, iv);
    CHECK(a == b);
    REQUIRE(a.has_value() == r.has_value());
    if (a) {
      CHECK(a->tau == r->tau);
      CHECK(a->kind == r->kind);
      CHECK(a->affected == r->affected);
      CHECK(a->statistic == doctest::Approx(r->statistic).epsilon(1e-9));
    }
  }
  const auto pa = statistic_profile(model, pen, {1, 120}, Execution::serial);
  const auto pb = statistic_profile(model, pen, {1, 120}, Execution::parallel);
  CHECK(pa.sparse == pb.sparse);
  CHECK(pa.dense == pb.dense);
}

TEST_CASE("scaling data and sigma together leaves the decision unchanged") {
  auto rows = gaussian_rows(6, 80, 23);
  for (std::size_t j = 40; j < 80; ++j) rows[2][j] += 3.0;
  auto scaled = rows;
  for (auto& r : scaled) {
    for (auto& v : r) v *= 7.5;
  }
  const auto pen = make_pen(2.0 * std::log(6.0), 5.0, 5.0 + 6.0 + std::sqrt(60.0));
  const auto a = scan_interval(CostModel::gaussian(make_matrix(rows), {1.0}), pen, {1, 80});
  const auto b = scan_interval(CostModel::gaussian(make_matrix(scaled), {7.5}), pen, {1, 80});
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->tau == b->tau);
  CHECK(a->kind == b->kind);
  CHECK(a->affected == b->affected);
}
