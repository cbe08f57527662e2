#include "icb/dosing.hpp"

#include <cmath>

#include "doctest.h"

using namespace icb;

namespace {

ModelParams untreated_patient() {
  ModelParams p = baseline_params();
  p.beta = 0.0089988;
  p.gamma = 37.4168;
  return p;
}

MetricsConfig dose_cfg() {
  MetricsConfig cfg;
  cfg.horizon = 400.0;
  return cfg;
}

}  // namespace

TEST_CASE("schedule validation") {
  DoseSchedule s;
  s.doses = {{10.0, 1e-6, 0.0}, {10.0, 1e-6, 0.0}};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.doses = {{10.0, -1e-6, 0.0}};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.doses = {{-1.0, 1e-6, 0.0}};
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s.doses = {{0.0, 1e-6, 0.0}, {21.0, 1e-6, 0.0}};
  CHECK_NOTHROW(validate(s));
}

TEST_CASE("dose application floors gamma at zero") {
  ModelParams p = baseline_params();
  const ModelParams q = apply_dose(p, {0.0, 0.001, 50.0});
  CHECK(q.beta == doctest::Approx(0.010));
  CHECK(q.gamma == 0.0);
}

TEST_CASE("illustrative schedule spans four three-week doses") {
  const DoseSchedule s = illustrative_schedule(1e-6, 1e-3);
  REQUIRE(s.doses.size() == 4);
  CHECK(s.doses[0].time == 0.0);
  CHECK(s.doses[3].time == 63.0);
  CHECK_NOTHROW(validate(s));
}

TEST_CASE("empty schedule reproduces plain integration sample for sample") {
  const ModelParams p = baseline_params();
  const StateVector y0 = initial_state(p);
  const auto [traj, journey] = simulate_with_doses(p, y0, {}, 50.0, dose_cfg());
  const Trajectory plain = integrate(p, y0, 0.0, 50.0);
  REQUIRE(traj.size() == plain.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(traj.times[i] == plain.times[i]);
    CHECK(traj.states[i] == plain.states[i]);
  }
  CHECK(journey.snapshots.size() == 1);
  CHECK(journey.snapshots[0].projected == ResponseClass::Delayed);
}

TEST_CASE("a time-zero dose equals starting with the post-dose parameters") {
  const ModelParams patient = untreated_patient();
  const StateVector y0 = initial_state(patient);
  const Dose dose{0.0, 0.0000012, 0.0028};  // to the combination setting
  DoseSchedule schedule;
  schedule.doses = {dose};

  const auto [traj, journey] = simulate_with_doses(patient, y0, schedule, 100.0, dose_cfg());
  const Trajectory plain = integrate(apply_dose(patient, dose), y0, 0.0, 100.0);
  REQUIRE(traj.size() == plain.size());
  for (std::size_t i = 0; i < traj.size(); i += 100) {
    CHECK(traj.states[i] == plain.states[i]);
  }
  REQUIRE(journey.snapshots.size() == 2);
  CHECK(journey.snapshots[0].projected == ResponseClass::NoResponse);
  CHECK(journey.snapshots[1].projected == ResponseClass::Delayed);
  CHECK(journey.snapshots[1].beta == doctest::Approx(0.009).epsilon(1e-12));
  CHECK(journey.snapshots[1].gamma == doctest::Approx(37.414).epsilon(1e-12));
}

TEST_CASE("single inhibitor and combination doses reproduce the published delays") {
  const ModelParams patient = untreated_patient();
  const StateVector y0 = initial_state(patient);
  MetricsConfig cfg = dose_cfg();

  SUBCASE("recruitment-only dose gives the five-month delay") {
    DoseSchedule s;
    s.doses = {{0.0, 0.0000012, 0.0}};
    const auto [traj, journey] = simulate_with_doses(patient, y0, s, 250.0, cfg);
    CHECK(journey.final_report.response == ResponseClass::Delayed);
    REQUIRE(journey.final_report.delay_length);
    CHECK(*journey.final_report.delay_length == doctest::Approx(157.3).epsilon(0.02));
  }

  SUBCASE("combination dose gives the two-month delay") {
    DoseSchedule s;
    s.doses = {{0.0, 0.0000012, 0.0028}};
    const auto [traj, journey] = simulate_with_doses(patient, y0, s, 250.0, cfg);
    CHECK(journey.final_report.response == ResponseClass::Delayed);
    REQUIRE(journey.final_report.delay_length);
    CHECK(*journey.final_report.delay_length == doctest::Approx(59.06).epsilon(0.02));
  }
}

TEST_CASE("combining the inhibitors beats either alone") {
  const ModelParams patient = untreated_patient();
  const StateVector y0 = initial_state(patient);
  MetricsConfig cfg = dose_cfg();

  auto delay_with = [&](double delta_beta, double delta_gamma) {
    DoseSchedule s;
    s.doses = {{0.0, delta_beta, delta_gamma}};
    const auto [traj, journey] = simulate_with_doses(patient, y0, s, 250.0, cfg);
    REQUIRE(journey.final_report.delay_length);
    return *journey.final_report.delay_length;
  };

  const double beta_only = delay_with(0.0000012, 0.0);
  const double gamma_only = delay_with(0.0, 0.0028);
  const double combination = delay_with(0.0000012, 0.0028);
  CHECK(combination < std::min(beta_only, gamma_only));
}

TEST_CASE("multi-dose journeys stay continuous across the jumps") {
  const ModelParams patient = untreated_patient();
  const StateVector y0 = initial_state(patient);
  DoseSchedule s;
  s.doses = {{10.0, 4e-7, 0.001}, {31.0, 4e-7, 0.001}, {52.0, 4e-7, 0.001}};
  const auto [traj, journey] = simulate_with_doses(patient, y0, s, 300.0, dose_cfg());

  REQUIRE(journey.snapshots.size() == 4);
  CHECK(journey.snapshots[3].beta == doctest::Approx(patient.beta + 3 * 4e-7));
  CHECK(journey.snapshots[3].gamma == doctest::Approx(patient.gamma - 3 * 0.001));

  for (std::size_t i = 1; i < traj.size(); ++i) {
    CHECK(traj.times[i] > traj.times[i - 1]);
    CHECK(traj.times[i] - traj.times[i - 1] <= 0.05 + 1e-9);
  }
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == 300.0);
}

TEST_CASE("an extra recruitment dose never lengthens the delay") {
  const ModelParams patient = baseline_params();  // already delayed
  const StateVector y0 = initial_state(patient);
  MetricsConfig cfg = dose_cfg();

  const auto [t_without, j_without] = simulate_with_doses(patient, y0, {}, 300.0, cfg);
  DoseSchedule s;
  s.doses = {{10.0, 5e-7, 0.0}};
  const auto [t_with, j_with] = simulate_with_doses(patient, y0, s, 300.0, cfg);

  REQUIRE(j_without.final_report.delay_length);
  REQUIRE(j_with.final_report.delay_length);
  CHECK(*j_with.final_report.delay_length <=
        *j_without.final_report.delay_length * (1.0 + 1e-9));
}

TEST_CASE("dose times past the horizon are rejected") {
  DoseSchedule s;
  s.doses = {{120.0, 1e-6, 0.0}};
  CHECK_THROWS_AS(simulate_with_doses(baseline_params(), initial_state(baseline_params()), s,
                                      100.0, dose_cfg()),
                  std::invalid_argument);
}

TEST_CASE("journey cases label the five transitions") {
  // Bands chosen so the gamma side stays in its quick region throughout.
  ThresholdBand band;
  band.beta_hat = 0.0089995;
  band.band_beta = 2e-6;
  band.gamma_hat = 37.4175;
  band.band_gamma = 0.017;
  const double g = 37.39;  // below gamma_hat - band_gamma

  CHECK(journey_case({0.00898, g}, {0.008985, g}, band) == JourneyCase::StillNoResponse);
  CHECK(journey_case({0.00898, g}, {0.009000, g}, band) == JourneyCase::DelayedOnset);
  CHECK(journey_case({0.00898, g}, {0.009100, g}, band) == JourneyCase::QuickOnset);
  CHECK(journey_case({0.009000, g}, {0.009001, g}, band) == JourneyCase::StillDelayed);
  CHECK(journey_case({0.009000, g}, {0.009100, g}, band) == JourneyCase::OvercameDelay);

  CHECK(to_label(JourneyCase::StillNoResponse) == 'a');
  CHECK(to_label(JourneyCase::DelayedOnset) == 'b');
  CHECK(to_label(JourneyCase::QuickOnset) == 'c');
  CHECK(to_label(JourneyCase::StillDelayed) == 'd');
  CHECK(to_label(JourneyCase::OvercameDelay) == 'e');

  // The suppressive side of either checkpoint pins the region.
  CHECK(journey_case({0.00898, 37.45}, {0.009100, 37.45}, band) == JourneyCase::StillNoResponse);

  CHECK_THROWS_AS(journey_case({0.009100, g}, {0.009200, g}, band), std::invalid_argument);
  CHECK_THROWS_AS(journey_case({0.009000, g}, {0.00898, g}, band), std::invalid_argument);
}
