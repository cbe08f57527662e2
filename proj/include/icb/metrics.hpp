#ifndef ICB_METRICS_HPP
#define ICB_METRICS_HPP

#include <optional>
#include <string_view>

#include "icb/integrate.hpp"

namespace icb {

enum class ResponseClass { NoResponse, QuickFull, QuickPartial, Delayed };

std::string_view to_string(ResponseClass c);
ResponseClass response_class_from_name(std::string_view name);

/// Thresholds that make the qualitative response taxonomy quantitative.
/// `c_star` is the reference tumour scale the band fractions apply to; it
/// should track the C_star of the parameters that produced the trajectory.
struct MetricsConfig {
  double response_frac = 0.5;      // fraction of C(0) marking response onset
  double quick_cutoff = 30.0;      // days separating quick from delayed
  double eradication_frac = 0.01;  // fraction of c_star counting as near-zero
  double partial_lo = 0.05;        // partial-band lower fraction of c_star
  double partial_hi = 0.95;        // partial-band upper fraction of c_star
  double steadiness_window = 100.0;   // days
  double steadiness_rel_var = 0.01;   // (max-min)/mean bound over the window
  double horizon = 3650.0;            // days
  double c_star = 1000.0;             // reference tumour scale, cells/nL

  friend bool operator==(const MetricsConfig&, const MetricsConfig&) = default;
};

void validate(const MetricsConfig& cfg);

struct ResponseReport {
  ResponseClass response = ResponseClass::NoResponse;
  std::optional<double> delay_length;        // days
  std::optional<double> dormancy_length;     // days
  std::optional<double> post_treatment_size; // cells/nL
  std::optional<double> cycle_period;        // days
  std::optional<double> effector_window;     // days
};

/// Earliest downward crossing of C through response_frac * C(0); nothing if
/// the tumour never responds before the horizon.
std::optional<double> delay_length(const Trajectory& traj, const MetricsConfig& cfg);

/// Time from the first downward crossing of eradication_frac * c_star to the
/// next upward crossing of response_frac * c_star (relapse).
std::optional<double> dormancy_length(const Trajectory& traj, const MetricsConfig& cfg);

/// Mean of C over the final steadiness window, when that window is steady
/// and the mean lies inside the partial band.
std::optional<double> post_treatment_size(const Trajectory& traj, const MetricsConfig& cfg);

/// Mean spacing between consecutive downward crossings of
/// response_frac * c_star, when at least two exist.
std::optional<double> cycle_period(const Trajectory& traj, const MetricsConfig& cfg);

/// Duration of the first maximal interval on which E > S.
std::optional<double> effector_window(const Trajectory& traj, const MetricsConfig& cfg);

/// Response taxonomy: NoResponse when there is no onset crossing; Delayed
/// when the onset is later than quick_cutoff; otherwise QuickPartial when the
/// tumour settles in the partial band, else QuickFull. Report fields are
/// populated per class (dormancy and cycle only for the relapsing classes,
/// post-treatment size only for QuickPartial).
ResponseReport classify(const Trajectory& traj, const MetricsConfig& cfg);

}  // namespace icb

#endif
