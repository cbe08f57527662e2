#ifndef ICB_CALIBRATION_HPP
#define ICB_CALIBRATION_HPP

#include <array>
#include <string>
#include <vector>

#include "icb/experiments.hpp"

namespace icb {

/// Derivative-free fit of a parameter subset to a target delay length.
struct FitSpec {
  std::vector<std::string> free_params;
  std::vector<std::pair<double, double>> bounds;  // per free parameter (lo, hi)
  std::vector<double> init;                       // starting values, within bounds
  double target_delay = 60.0;                     // days
  int max_evals = 500;
  double tol_days = 1.0;
};

void validate(const FitSpec& spec, const MetricsConfig& cfg);

enum class FitStatus { Converged, MaxEvals, Infeasible };

std::string_view to_string(FitStatus s);

struct FitResult {
  ModelParams fitted;
  double achieved_delay = 0.0;  // +infinity when no probed point responded
  int evals = 0;
  bool converged = false;
  FitStatus status = FitStatus::MaxEvals;
  std::vector<double> residual_history;  // best objective after each iteration
};

/// Minimize (delay - target)^2 by a Nelder-Mead simplex over the free
/// parameters, clamped to bounds. NoResponse evaluations incur the finite
/// penalty horizon^2 so the search can still rank infeasible points. The
/// returned parameters are re-verified by one final simulation. The search
/// is fully deterministic.
FitResult fit_delay(const FitSpec& spec, const ModelParams& base, const MetricsConfig& cfg,
                    const IntegratorConfig& icfg = {});

/// Delay measured for one (beta, gamma) setting under one r_C candidate.
struct RcSettingDelay {
  std::string label;
  double beta = 0.0;
  double gamma = 0.0;
  std::optional<double> delay;  // absent when NoResponse
};

struct RcCandidate {
  double r_c = 0.0;
  std::array<RcSettingDelay, 3> settings;
  double score = 0.0;  // sum of relative delay errors; +infinity on NoResponse
};

struct RcReport {
  std::array<double, 3> target_delays{};  // days, matching the three settings
  RcCandidate low;                        // r_C = 1.0
  RcCandidate high;                       // r_C = 30.0
  double resolved_r_c = 0.0;
};

/// Runs the single-inhibitor and combination settings under both r_C
/// candidates and reports which one reproduces the published delay pattern.
/// targets default to (150, 120, 60) days: the 5-, 4- and 2-month delays.
RcReport resolve_rc(const std::array<double, 3>& targets, const MetricsConfig& cfg,
                    const IntegratorConfig& icfg = {});

}  // namespace icb

#endif
