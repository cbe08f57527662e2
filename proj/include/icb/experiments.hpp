#ifndef ICB_EXPERIMENTS_HPP
#define ICB_EXPERIMENTS_HPP

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "icb/metrics.hpp"

namespace icb {

namespace detail {

/// Shrink a bracket [lo, hi] with pred(lo) != pred(hi) until its width is at
/// most `resolution`; returns the final bracket. The predicate must be
/// deterministic.
std::pair<double, double> bisect(double lo, double hi, double resolution,
                                 const std::function<bool(double)>& pred);

}  // namespace detail

/// Simulate from the standard initial condition over cfg.horizon and
/// classify. The metrics reference scale (cfg.c_star) follows params.C_star.
/// Throws std::runtime_error on integrator step failure.
ResponseReport simulate_and_classify(const ModelParams& params, MetricsConfig cfg,
                                     const IntegratorConfig& icfg = {}, double signal_seed = 1.0);

/// Same, classifying from an explicit starting state.
ResponseReport classify_from(const ModelParams& params, const StateVector& state0,
                             MetricsConfig cfg, const IntegratorConfig& icfg = {});

/// One-at-a-time sensitivity of the delay and dormancy lengths to a single
/// parameter, relative to the unperturbed baseline.
struct SensitivityRow {
  std::string param_name;
  double perturbation = 0.0;   // signed fraction applied to the parameter
  double delta_delay = 0.0;    // relative change; +infinity when the perturbed run is NoResponse
  std::optional<double> delta_dormancy;  // absent when either run has no dormancy
  std::optional<std::string> error;      // per-row integration failure, if any
};

/// Re-simulates with each parameter scaled by (1 + frac) in turn. The
/// unperturbed baseline must classify as Delayed. Rows whose integration
/// fails carry an error note instead of aborting the table.
std::vector<SensitivityRow> oat_sensitivity(const ModelParams& baseline, double frac,
                                            const MetricsConfig& cfg,
                                            const IntegratorConfig& icfg = {});

struct ThresholdResult {
  std::string param_name;
  double critical_value = 0.0;
  double bracket_width = 0.0;
  ResponseClass class_below = ResponseClass::NoResponse;
  ResponseClass class_above = ResponseClass::NoResponse;
};

/// Bisection on a parameter value with the full response classification as
/// the predicate, narrowing to bracket_width <= resolution. The endpoint
/// classes must differ. When exactly one endpoint is NoResponse the search
/// tracks the response/no-response boundary (the jump from a finite to an
/// infinite delay); otherwise it tracks the boundary of the low-endpoint
/// class. Throws std::invalid_argument when both endpoints classify alike.
ThresholdResult find_threshold(const ModelParams& base, std::string_view param_name, double lo,
                               double hi, double resolution, const MetricsConfig& cfg,
                               const IntegratorConfig& icfg = {});

struct AxisSpec {
  std::string param_name;
  double lo = 0.0;
  double hi = 0.0;
  int count = 2;  // 1 degenerates to the single value lo
};

/// Response classes over a 2-D parameter grid. axis1 varies within a row,
/// axis2 across rows; classes are stored row-major.
struct RegionMap {
  AxisSpec axis1;
  AxisSpec axis2;
  std::vector<ResponseClass> classes;
  std::vector<std::optional<std::string>> cell_errors;
  std::vector<std::optional<double>> band_width;  // Delayed extent per row, axis1 units

  ResponseClass at(int i1, int i2) const {
    return classes[static_cast<std::size_t>(i2) * static_cast<std::size_t>(axis1.count) +
                   static_cast<std::size_t>(i1)];
  }
};

double axis_value(const AxisSpec& axis, int i);

/// Classify every grid cell independently; per-cell failures are recorded
/// and the map is still returned. Each row's Delayed band extent is refined
/// with find_threshold across the bordering cell pairs.
RegionMap region_map(const ModelParams& base, const AxisSpec& axis1, const AxisSpec& axis2,
                     const MetricsConfig& cfg, const IntegratorConfig& icfg = {});

}  // namespace icb

#endif
