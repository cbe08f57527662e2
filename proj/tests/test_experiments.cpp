#include "icb/experiments.hpp"

#include <cmath>

#include "doctest.h"

using namespace icb;

TEST_CASE("bisection recovers a synthetic predicate boundary") {
  const double boundary = 3.14159265;
  auto pred = [&](double x) { return x < boundary; };
  for (double resolution : {1e-2, 1e-4, 1e-6}) {
    const auto [lo, hi] = detail::bisect(0.0, 10.0, resolution, pred);
    CHECK(hi - lo <= resolution);
    CHECK(lo <= boundary);
    CHECK(hi >= boundary);
  }

  // Each halving of the resolution adds exactly one bisection step.
  const auto [lo1, hi1] = detail::bisect(0.0, 10.0, 1e-3, pred);
  const auto [lo2, hi2] = detail::bisect(0.0, 10.0, 5e-4, pred);
  CHECK((hi2 - lo2) == doctest::Approx((hi1 - lo1) / 2.0));
}

TEST_CASE("identity perturbation produces exactly zero deltas") {
  MetricsConfig cfg;
  cfg.horizon = 400.0;
  const auto rows = oat_sensitivity(baseline_params(), 0.0, cfg);
  REQUIRE(rows.size() == 14);
  for (const auto& row : rows) {
    CAPTURE(row.param_name);
    CHECK_FALSE(row.error);
    CHECK(row.delta_delay == 0.0);
    REQUIRE(row.delta_dormancy);
    CHECK(*row.delta_dormancy == 0.0);
  }
}

TEST_CASE("one-percent sensitivities reproduce the directional pattern") {
  MetricsConfig cfg;
  const auto rows = oat_sensitivity(baseline_params(), 0.01, cfg);
  REQUIRE(rows.size() == 14);

  auto row = [&](std::string_view name) -> const SensitivityRow& {
    for (const auto& r : rows) {
      if (r.param_name == name) return r;
    }
    FAIL("missing row");
    return rows.front();
  };

  // The recruitment coefficient shortens the delay dramatically; checked
  // within a factor of two of the reported three-quarters reduction.
  CHECK(row("beta").delta_delay < -0.37);
  CHECK(row("beta").delta_delay > -1.0);
  // The suppression coefficient pushes the delay past the response boundary.
  CHECK(row("gamma").delta_delay > 0.25);

  for (const char* name : {"r_C", "C_star", "r_A", "r_I", "r_E", "E_star"}) {
    CAPTURE(name);
    CHECK(row(name).delta_delay < 0.0);
  }
  for (const char* name : {"kappa", "delta_A", "delta_I", "S_star"}) {
    CAPTURE(name);
    CHECK(row(name).delta_delay > 0.0);
  }

  // Dormancy is insensitive to everything measurable except r_max.
  for (const auto& r : rows) {
    if (r.param_name == "r_max" || !r.delta_dormancy) continue;
    CAPTURE(r.param_name);
    CHECK(std::abs(*r.delta_dormancy) <= 0.10);
  }
}

TEST_CASE("sensitivity rejects a non-delayed baseline") {
  ModelParams p = baseline_params();
  p.gamma = 37.4168;
  p.E_star = 5.5;  // quick full response
  MetricsConfig cfg;
  cfg.horizon = 400.0;
  CHECK_THROWS_AS(oat_sensitivity(p, 0.01, cfg), std::invalid_argument);
}

TEST_CASE("threshold location for the effector baseline at suppressive settings") {
  ModelParams p = baseline_params();
  p.beta = 0.0089988;
  p.gamma = 37.4168;
  MetricsConfig cfg;
  const ThresholdResult result = find_threshold(p, "E_star", 4.5, 5.5, 1e-3, cfg);
  CHECK(result.bracket_width <= 1e-3);
  CHECK(result.critical_value > 4.99);
  CHECK(result.critical_value < 5.06);
  CHECK(result.class_below == ResponseClass::NoResponse);
  CHECK(result.class_above != ResponseClass::NoResponse);
}

TEST_CASE("threshold requires differing endpoint classes") {
  MetricsConfig cfg;
  cfg.horizon = 400.0;
  CHECK_THROWS_AS(find_threshold(baseline_params(), "gamma", 37.41, 37.4145, 1e-3, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(find_threshold(baseline_params(), "gamma", 37.42, 37.40, 1e-3, cfg),
                  std::invalid_argument);
}

TEST_CASE("a slice along the suppression axis shows one contiguous delayed band") {
  AxisSpec gamma_axis{"gamma", 37.40, 37.43, 7};
  AxisSpec beta_axis{"beta", 0.009, 0.009, 1};
  MetricsConfig cfg;
  const RegionMap map = region_map(baseline_params(), gamma_axis, beta_axis, cfg);
  REQUIRE(map.classes.size() == 7);

  int runs = 0;
  bool in_run = false;
  for (int i = 0; i < 7; ++i) {
    const bool delayed = map.at(i, 0) == ResponseClass::Delayed;
    if (delayed && !in_run) ++runs;
    in_run = delayed;
    CHECK_FALSE(map.cell_errors[static_cast<std::size_t>(i)]);
  }
  CHECK(runs == 1);
  REQUIRE(map.band_width[0]);
  CHECK(*map.band_width[0] > 0.0);
  CHECK(*map.band_width[0] < 0.03);

  // Determinism: evaluating the same grid again yields the identical map.
  const RegionMap again = region_map(baseline_params(), gamma_axis, beta_axis, cfg);
  CHECK(again.classes == map.classes);
  CHECK(again.band_width == map.band_width);
}

TEST_CASE("degenerate single-cell grid at the baseline is delayed") {
  AxisSpec a1{"gamma", 37.414, 37.414, 1};
  AxisSpec a2{"beta", 0.009, 0.009, 1};
  MetricsConfig cfg;
  const RegionMap map = region_map(baseline_params(), a1, a2, cfg);
  REQUIRE(map.classes.size() == 1);
  CHECK(map.at(0, 0) == ResponseClass::Delayed);
  REQUIRE(map.band_width[0]);
  CHECK(*map.band_width[0] == 0.0);
}

TEST_CASE("invalid cells are recorded without aborting the map") {
  // A negative beta cell violates the parameter invariants; its error is
  // recorded and the remaining cells still classify.
  AxisSpec beta_axis{"beta", -0.001, 0.009, 2};
  AxisSpec gamma_axis{"gamma", 37.414, 37.414, 1};
  MetricsConfig cfg;
  cfg.horizon = 400.0;
  const RegionMap map = region_map(baseline_params(), beta_axis, gamma_axis, cfg);
  REQUIRE(map.cell_errors[0]);
  CHECK(map.cell_errors[0]->find("beta") != std::string::npos);
  CHECK_FALSE(map.cell_errors[1]);
  CHECK(map.at(1, 0) == ResponseClass::Delayed);
}

TEST_CASE("axis values span the range inclusively") {
  AxisSpec axis{"gamma", 1.0, 3.0, 5};
  CHECK(axis_value(axis, 0) == 1.0);
  CHECK(axis_value(axis, 2) == 2.0);
  CHECK(axis_value(axis, 4) == 3.0);
  AxisSpec single{"gamma", 7.0, 9.0, 1};
  CHECK(axis_value(single, 0) == 7.0);
}
