#include "doctest.h"
#include "subset/core.hpp"

using namespace subset;

TEST_CASE("make_matrix builds a validated panel") {
  const auto m = make_matrix({{1, 2}, {3, 4}});
  CHECK(m.dims() == 2);
  CHECK(m.length() == 2);
  CHECK(m.at(1, 1) == 3.0);
  CHECK(m.at(0, 2) == 2.0);
  CHECK(m.variate_names() == std::vector<std::string>{"V1", "V2"});
  CHECK(m.is_count_data());
}

TEST_CASE("make_matrix rejects ragged and empty input") {
  CHECK_THROWS_WITH_AS(make_matrix({{1, 2}, {3}}), doctest::Contains("ragged"), InputError);
  CHECK_THROWS_WITH_AS(make_matrix({}), doctest::Contains("empty"), InputError);
  CHECK_THROWS_AS(make_matrix({{1}}), InputError);
  CHECK_THROWS_AS(make_matrix({{1, 2}}, {"a", "b"}), InputError);
}

TEST_CASE("count detection") {
  CHECK_FALSE(make_matrix({{1.5, 2}}).is_count_data());
  CHECK_FALSE(make_matrix({{-1, 2}}).is_count_data());
}

TEST_CASE("penalty function is the capped line") {
  PenaltyConfig p;
  p.alpha = 2;
  p.beta = 3;
  p.K = 10;
  CHECK(p(0) == 3.0);
  CHECK(p(2) == 7.0);
  CHECK(p(4) == 10.0);
  CHECK_NOTHROW(p.validate());
  p.K = 1;
  CHECK_THROWS_AS(p.validate(), InputError);
}

TEST_CASE("random streams are reproducible and distinct") {
  RandomSource a(42, 3), b(42, 3), c(42, 4);
  std::vector<double> va, vb, vc;
  for (int k = 0; k < 8; ++k) {
    va.push_back(a.normal());
    vb.push_back(b.normal());
    vc.push_back(c.normal());
  }
  CHECK(va == vb);
  CHECK(va != vc);

  RandomSource s1 = RandomSource(9).substream(5);
  RandomSource s2 = RandomSource(9).substream(5);
  CHECK(s1.uniform_index(1, 1000000) == s2.uniform_index(1, 1000000));
}

TEST_CASE("negative binomial draws have the right mean") {
  RandomSource rng(1);
  double sum = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) sum += rng.negbin(20.0, 0.5);
  // mean r (1 - p) / p = 20, sd of the sample mean ~ sqrt(40 / n)
  CHECK(sum / n == doctest::Approx(20.0).epsilon(0.02));
  CHECK_THROWS_AS(rng.negbin(1.0, 1.0), InputError);
}

TEST_CASE("log tolerance uses the natural log") {
  CHECK(log_tolerance(1000) == 7);
  CHECK(log_tolerance(200) == 6);
  CHECK(log_tolerance(564) == 7);
}

TEST_CASE("string round trips for enums") {
  for (auto k : {ChangeKind::sparse, ChangeKind::dense}) CHECK(change_kind_from_string(to_string(k)) == k);
  for (auto s : {PenaltySource::theoretical, PenaltySource::calibrated, PenaltySource::manual}) {
    CHECK(penalty_source_from_string(to_string(s)) == s);
  }
  CHECK_THROWS_AS(model_kind_from_string("poisson"), InputError);
}
