#ifndef ICB_INTEGRATE_HPP
#define ICB_INTEGRATE_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "icb/model.hpp"

namespace icb {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-9;   // per-component absolute tolerance
  double h_init = 1e-3;    // days
  double h_max = 5.0;      // days
  double h_min = 1e-10;    // days
  std::int64_t max_steps = 5'000'000;
  double output_dt = 0.05;  // uniform reporting grid, days

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

void validate(const IntegratorConfig& cfg);

enum class Termination { ReachedHorizon, EventStop, StepFailure };

std::string_view to_string(Termination t);

struct StepStats {
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t rhs_evals = 0;
};

/// Time-ordered samples of one integration on the uniform reporting grid.
/// `derivs` holds the model right-hand side evaluated at each sample, which
/// makes piecewise cubic Hermite interpolation between samples possible
/// without re-access to the parameters.
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<StateDerivative> derivs;
  StepStats step_stats;
  Termination termination = Termination::ReachedHorizon;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  double value(std::size_t i, Component c) const {
    return states[i][static_cast<int>(c)];
  }
};

/// Integrate the model from state0 over [t0, t1] with an adaptive embedded
/// Dormand-Prince 5(4) pair. Local error per step is held below
/// abs_tol + rel_tol*|y| component-wise. A component driven below zero by an
/// otherwise acceptable step is clamped to zero when its magnitude is below
/// abs_tol; larger undershoots reject the step.
///
/// On step failure (h below h_min or max_steps exceeded) the partial
/// trajectory accumulated so far is returned with
/// termination == Termination::StepFailure.
Trajectory integrate(const ModelParams& params, const StateVector& state0, double t0, double t1,
                     const IntegratorConfig& cfg = {});

/// Cubic Hermite interpolation of the trajectory at time t (clamped to the
/// sampled range). Requires a non-empty trajectory.
StateVector interpolate(const Trajectory& traj, double t);

enum class CrossingDirection { Downward, Upward };

/// Earliest time > `after` at which the sampled component crosses `level` in
/// the given direction. The bracketing grid interval is refined by bisection
/// on the local Hermite interpolant to within output grid spacing / 1000.
std::optional<double> find_crossing(const Trajectory& traj, Component component, double level,
                                    CrossingDirection direction,
                                    double after = -std::numeric_limits<double>::infinity());

}  // namespace icb

#endif
