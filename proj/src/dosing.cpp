#include "icb/dosing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace icb {

namespace {

enum class Region { NoResponse = 0, Delayed = 1, Quick = 2 };

Region point_region(double beta, double gamma, const ThresholdBand& t) {
  Region by_beta = Region::Quick;
  if (beta < t.beta_hat) {
    by_beta = Region::NoResponse;
  } else if (beta <= t.beta_hat + t.band_beta) {
    by_beta = Region::Delayed;
  }
  Region by_gamma = Region::Quick;
  if (gamma > t.gamma_hat) {
    by_gamma = Region::NoResponse;
  } else if (gamma >= t.gamma_hat - t.band_gamma) {
    by_gamma = Region::Delayed;
  }
  // Both checkpoints must permit a response; the less favourable side rules.
  return static_cast<Region>(std::min(static_cast<int>(by_beta), static_cast<int>(by_gamma)));
}

}  // namespace

void validate(const DoseSchedule& schedule) {
  double prev = -std::numeric_limits<double>::infinity();
  for (const auto& d : schedule.doses) {
    if (!(d.time >= 0.0)) throw std::invalid_argument("dose times must be >= 0");
    if (!(d.time > prev)) throw std::invalid_argument("dose times must be strictly increasing");
    if (!(d.delta_beta >= 0.0) || !(d.delta_gamma >= 0.0)) {
      throw std::invalid_argument("dose deltas must be >= 0");
    }
    prev = d.time;
  }
}

DoseSchedule illustrative_schedule(double delta_beta, double delta_gamma) {
  DoseSchedule schedule;
  for (int k = 0; k < 4; ++k) {
    schedule.doses.push_back({21.0 * k, delta_beta, delta_gamma});
  }
  return schedule;
}

ModelParams apply_dose(const ModelParams& p, const Dose& dose) {
  ModelParams out = p;
  out.beta += dose.delta_beta;
  out.gamma = std::max(0.0, out.gamma - dose.delta_gamma);
  return out;
}

std::pair<Trajectory, JourneyReport> simulate_with_doses(const ModelParams& patient,
                                                         const StateVector& state0,
                                                         const DoseSchedule& schedule,
                                                         double horizon, const MetricsConfig& cfg,
                                                         const IntegratorConfig& icfg) {
  validate(patient);
  validate_state(state0);
  validate(schedule);
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!schedule.doses.empty() && schedule.doses.back().time >= horizon) {
    throw std::invalid_argument("dose times must lie before the horizon");
  }

  MetricsConfig mcfg = cfg;
  mcfg.c_star = patient.C_star;

  auto project = [&](const ModelParams& p, const StateVector& y) {
    return classify_from(p, y, mcfg, icfg).response;
  };

  JourneyReport journey;
  journey.snapshots.push_back({0.0, patient.beta, patient.gamma, project(patient, state0)});

  Trajectory full;
  full.termination = Termination::ReachedHorizon;
  ModelParams params = patient;
  StateVector y = state0;
  double t = 0.0;

  auto append_segment = [&](double t_end, std::size_t segment_index) {
    Trajectory seg = integrate(params, y, t, t_end, icfg);
    full.step_stats.accepted += seg.step_stats.accepted;
    full.step_stats.rejected += seg.step_stats.rejected;
    full.step_stats.rhs_evals += seg.step_stats.rhs_evals;
    // The junction sample is shared; keep the incoming segment's copy so the
    // stored derivative reflects the parameters in effect going forward.
    if (!full.empty() && !seg.empty()) {
      full.times.pop_back();
      full.states.pop_back();
      full.derivs.pop_back();
    }
    full.times.insert(full.times.end(), seg.times.begin(), seg.times.end());
    full.states.insert(full.states.end(), seg.states.begin(), seg.states.end());
    full.derivs.insert(full.derivs.end(), seg.derivs.begin(), seg.derivs.end());
    if (seg.termination == Termination::StepFailure) {
      throw std::runtime_error("integration step failure in dose segment " +
                               std::to_string(segment_index));
    }
    y = seg.states.back();
    t = seg.times.back();
  };

  for (std::size_t k = 0; k < schedule.doses.size(); ++k) {
    const Dose& dose = schedule.doses[k];
    if (dose.time > t) append_segment(dose.time, k);
    params = apply_dose(params, dose);
    journey.snapshots.push_back({dose.time, params.beta, params.gamma, project(params, y)});
  }
  append_segment(horizon, schedule.doses.size());

  journey.final_report = classify(full, mcfg);
  return {std::move(full), std::move(journey)};
}

char to_label(JourneyCase c) {
  switch (c) {
    case JourneyCase::StillNoResponse: return 'a';
    case JourneyCase::DelayedOnset: return 'b';
    case JourneyCase::QuickOnset: return 'c';
    case JourneyCase::StillDelayed: return 'd';
    case JourneyCase::OvercameDelay: return 'e';
  }
  return '?';
}

JourneyCase journey_case(std::pair<double, double> pre_beta_gamma,
                         std::pair<double, double> post_beta_gamma,
                         const ThresholdBand& thresholds) {
  const Region pre = point_region(pre_beta_gamma.first, pre_beta_gamma.second, thresholds);
  const Region post = point_region(post_beta_gamma.first, post_beta_gamma.second, thresholds);
  if (pre == Region::Quick) {
    throw std::invalid_argument("pre-dose point already lies in the quick-response region");
  }
  if (static_cast<int>(post) < static_cast<int>(pre)) {
    throw std::invalid_argument("dose moved the patient away from the response region");
  }
  if (pre == Region::NoResponse) {
    if (post == Region::NoResponse) return JourneyCase::StillNoResponse;
    if (post == Region::Delayed) return JourneyCase::DelayedOnset;
    return JourneyCase::QuickOnset;
  }
  return post == Region::Delayed ? JourneyCase::StillDelayed : JourneyCase::OvercameDelay;
}

}  // namespace icb
