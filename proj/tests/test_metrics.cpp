#include <doctest.h>

#include "tbrilab/metrics.hpp"

using namespace tbrilab;

TEST_SUITE("metrics") {

TEST_CASE("reference confusion counts reproduce their reported metrics") {
  MetricsResult m = compute_metrics(ConfusionCounts{89, 64, 15, 40});
  REQUIRE(m.precision);
  REQUIRE(m.accuracy);
  REQUIRE(m.f1);
  CHECK(*m.precision == doctest::Approx(89.0 / 153.0).epsilon(1e-9));
  CHECK(*m.accuracy == doctest::Approx(129.0 / 208.0).epsilon(1e-9));
  CHECK(*m.f1 == doctest::Approx(178.0 / 257.0).epsilon(1e-9));
  CHECK(std::abs(*m.precision - 0.5806) <= 0.005);
  CHECK(std::abs(*m.accuracy - 0.6202) <= 0.005);
  CHECK(std::abs(*m.f1 - 0.6950) <= 0.005);
}

TEST_CASE("zero-over-zero components are undefined, not silently 0 or 1") {
  MetricsResult m = compute_metrics(ConfusionCounts{0, 0, 0, 10});
  CHECK_FALSE(m.precision.has_value());
  CHECK_FALSE(m.recall.has_value());
  CHECK_FALSE(m.f1.has_value());
  REQUIRE(m.accuracy);
  CHECK(*m.accuracy == 1.0);
}

TEST_CASE("perfect precision with zero false positives") {
  MetricsResult m = compute_metrics(ConfusionCounts{69, 0, 34, 104});
  REQUIRE(m.precision);
  CHECK(*m.precision == 1.0);
}

TEST_CASE("all-zero counts are an error") {
  try {
    compute_metrics(ConfusionCounts{});
    FAIL("expected empty-counts error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyCounts);
  }
}

TEST_CASE("f1 is the harmonic mean of precision and recall") {
  ConfusionCounts c{30, 10, 20, 40};
  MetricsResult m = compute_metrics(c);
  double p = 30.0 / 40.0, r = 30.0 / 50.0;
  CHECK(*m.f1 == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-12));
  // not the harmonic mean of precision and accuracy
  double a = 70.0 / 100.0;
  CHECK(*m.f1 != doctest::Approx(2 * p * a / (p + a)).epsilon(1e-6));
}

}  // TEST_SUITE
