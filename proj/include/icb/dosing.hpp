#ifndef ICB_DOSING_HPP
#define ICB_DOSING_HPP

#include <utility>
#include <vector>

#include "icb/experiments.hpp"

namespace icb {

/// One checkpoint-blockade administration: an instantaneous, permanent
/// parameter step. beta increases by delta_beta; gamma decreases by
/// delta_gamma, floored at zero.
struct Dose {
  double time = 0.0;        // days
  double delta_beta = 0.0;  // >= 0
  double delta_gamma = 0.0; // >= 0
};

struct DoseSchedule {
  std::vector<Dose> doses;  // strictly increasing times; may be empty
};

void validate(const DoseSchedule& schedule);

/// Four equal doses three weeks apart, for documentation examples.
DoseSchedule illustrative_schedule(double delta_beta, double delta_gamma);

ModelParams apply_dose(const ModelParams& p, const Dose& dose);

struct JourneySnapshot {
  double time = 0.0;   // 0 for the pre-treatment entry, else the dose time
  double beta = 0.0;   // parameter values in effect from this point
  double gamma = 0.0;
  ResponseClass projected = ResponseClass::NoResponse;  // class these parameters
                                                        // would produce from the
                                                        // state reached at `time`
};

struct JourneyReport {
  std::vector<JourneySnapshot> snapshots;  // doses + 1 entries
  ResponseReport final_report;             // classification of the full journey
};

/// Piecewise integration across the dose schedule: integrate to each dose
/// time, step the parameters, and restart from the reached state. The
/// segments concatenate into a single trajectory with no time gaps; the
/// state is continuous across each jump.
std::pair<Trajectory, JourneyReport> simulate_with_doses(const ModelParams& patient,
                                                         const StateVector& state0,
                                                         const DoseSchedule& schedule,
                                                         double horizon, const MetricsConfig& cfg,
                                                         const IntegratorConfig& icfg = {});

/// Response-region thresholds in the (beta, gamma) plane, as produced by
/// find_threshold. beta_hat is the lower response threshold with band_beta
/// the Delayed width above it; gamma_hat is the upper response threshold
/// with band_gamma the Delayed width below it.
struct ThresholdBand {
  double beta_hat = 0.0;
  double band_beta = 0.0;
  double gamma_hat = 0.0;
  double band_gamma = 0.0;
};

enum class JourneyCase {
  StillNoResponse,  // (a) dose leaves the patient in the no-response region
  DelayedOnset,     // (b) no-response patient lands in the delayed band
  QuickOnset,       // (c) no-response patient lands in the quick region
  StillDelayed,     // (d) delayed-band patient stays in the band
  OvercameDelay,    // (e) delayed-band patient reaches the quick region
};

char to_label(JourneyCase c);  // 'a'..'e'

/// Label the pre -> post transition of a dose against the threshold band.
/// A point is in the no-response region when either checkpoint is on its
/// suppressive side, in the quick region when both are past their bands,
/// and in the delayed band otherwise. The pre point must not already be in
/// the quick region, and the dose must not move against the response
/// direction; both throw std::invalid_argument.
JourneyCase journey_case(std::pair<double, double> pre_beta_gamma,
                         std::pair<double, double> post_beta_gamma,
                         const ThresholdBand& thresholds);

}  // namespace icb

#endif
