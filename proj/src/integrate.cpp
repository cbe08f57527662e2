#include "icb/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icb {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0;
constexpr double c3 = 3.0 / 10.0;
constexpr double c4 = 4.0 / 5.0;
constexpr double c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
// Fifth-order weights (also the last stage's row).
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference between the fifth- and embedded fourth-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinScale = 0.2;
constexpr double kMaxScale = 10.0;

StateVector hermite(double t, double ta, const StateVector& ya, const StateVector& fa, double tb,
                    const StateVector& yb, const StateVector& fb) {
  const double h = tb - ta;
  const double th = (t - ta) / h;
  const double th2 = th * th;
  const double th3 = th2 * th;
  const double h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
  const double h10 = th3 - 2.0 * th2 + th;
  const double h01 = -2.0 * th3 + 3.0 * th2;
  const double h11 = th3 - th2;
  return h00 * ya + (h * h10) * fa + h01 * yb + (h * h11) * fb;
}

}  // namespace

void validate(const IntegratorConfig& cfg) {
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0)) {
    throw std::invalid_argument("rel_tol must lie in (0, 1)");
  }
  if (!(cfg.abs_tol > 0.0)) throw std::invalid_argument("abs_tol must be > 0");
  if (!(cfg.h_min > 0.0 && cfg.h_min <= cfg.h_init && cfg.h_init <= cfg.h_max)) {
    throw std::invalid_argument("step sizes must satisfy 0 < h_min <= h_init <= h_max");
  }
  if (!(cfg.output_dt > 0.0)) throw std::invalid_argument("output_dt must be > 0");
  if (cfg.max_steps <= 0) throw std::invalid_argument("max_steps must be > 0");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::ReachedHorizon: return "reached-horizon";
    case Termination::EventStop: return "event-stop";
    case Termination::StepFailure: return "step-failure";
  }
  return "unknown";
}

Trajectory integrate(const ModelParams& params, const StateVector& state0, double t0, double t1,
                     const IntegratorConfig& cfg) {
  validate(params);
  validate_state(state0);
  validate(cfg);
  if (!(t1 >= t0)) throw std::invalid_argument("t1 must be >= t0");

  Trajectory traj;
  const double fuzz = cfg.output_dt * 1e-9;

  // Reporting grid t0, t0+dt, ..., plus t1 itself when the span is not a
  // multiple of output_dt.
  std::vector<double> grid;
  const std::int64_t whole = static_cast<std::int64_t>(std::floor((t1 - t0) / cfg.output_dt + fuzz));
  grid.reserve(static_cast<std::size_t>(whole) + 2);
  for (std::int64_t i = 0; i <= whole; ++i) grid.push_back(t0 + static_cast<double>(i) * cfg.output_dt);
  if (grid.back() < t1 - fuzz) grid.push_back(t1);

  auto emit = [&](double t, const StateVector& y, const StateDerivative& f) {
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.derivs.push_back(f);
  };

  StateVector y = state0;
  StateDerivative f = rhs(y, params);
  traj.step_stats.rhs_evals += 1;
  emit(t0, y, f);

  if (t1 == t0) {
    traj.termination = Termination::ReachedHorizon;
    return traj;
  }

  std::size_t next_grid = 1;
  double t = t0;
  double h = std::min(cfg.h_init, t1 - t0);

  StateVector k2, k3, k4, k5, k6, k7, y_new;

  while (t < t1 - fuzz) {
    if (traj.step_stats.accepted + traj.step_stats.rejected >= cfg.max_steps) {
      traj.termination = Termination::StepFailure;
      return traj;
    }
    h = std::min(h, t1 - t);
    if (!(t + h > t)) {  // step no longer representable
      traj.termination = Termination::StepFailure;
      return traj;
    }

    k2 = rhs(StateVector(y + h * (a21 * f)), params);
    k3 = rhs(StateVector(y + h * (a31 * f + a32 * k2)), params);
    k4 = rhs(StateVector(y + h * (a41 * f + a42 * k2 + a43 * k3)), params);
    k5 = rhs(StateVector(y + h * (a51 * f + a52 * k2 + a53 * k3 + a54 * k4)), params);
    k6 = rhs(StateVector(y + h * (a61 * f + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)), params);
    y_new = y + h * (b1 * f + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = rhs(y_new, params);
    traj.step_stats.rhs_evals += 6;

    const StateVector err_vec =
        h * (e1 * f + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err_sq = 0.0;
    for (int i = 0; i < kStateDim; ++i) {
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = err_vec[i] / scale;
      err_sq += r * r;
    }
    const double err = std::sqrt(err_sq / kStateDim);

    bool reject = !(err <= 1.0);  // NaN rejects
    bool clamped = false;
    if (!reject) {
      double worst = 0.0;
      for (int i = 0; i < kStateDim; ++i) worst = std::min(worst, y_new[i]);
      if (worst < 0.0) {
        if (-worst < cfg.abs_tol) {
          for (int i = 0; i < kStateDim; ++i) y_new[i] = std::max(y_new[i], 0.0);
          clamped = true;
        } else {
          reject = true;
        }
      }
    }

    if (reject) {
      traj.step_stats.rejected += 1;
      double scale = 0.5;  // negative-undershoot or non-finite error
      if (std::isfinite(err) && err > 1.0) {
        scale = std::max(kMinScale, kSafety * std::pow(err, -0.2));
      }
      h = std::max(h * std::min(1.0, scale), 0.0);
      if (h < cfg.h_min) {
        traj.termination = Termination::StepFailure;
        return traj;
      }
      continue;
    }

    if (clamped) {
      k7 = rhs(y_new, params);
      traj.step_stats.rhs_evals += 1;
    }

    const double t_new = (t + h >= t1 - fuzz) ? std::min(t + h, t1) : t + h;
    while (next_grid < grid.size() && grid[next_grid] <= t_new + fuzz) {
      const double tg = grid[next_grid];
      if (tg >= t_new - fuzz) {
        emit(tg, y_new, k7);
      } else {
        StateVector yg = hermite(tg, t, y, f, t_new, y_new, k7);
        for (int i = 0; i < kStateDim; ++i) {
          if (yg[i] < 0.0 && yg[i] > -10.0 * cfg.abs_tol) yg[i] = 0.0;
        }
        emit(tg, yg, rhs(yg, params));
        traj.step_stats.rhs_evals += 1;
      }
      ++next_grid;
    }

    traj.step_stats.accepted += 1;
    t = t_new;
    y = y_new;
    f = k7;  // first stage of the next step
    const double grow = std::min(kMaxScale, std::max(kMinScale, kSafety * std::pow(std::max(err, 1e-16), -0.2)));
    h = std::min(h * grow, cfg.h_max);
  }

  traj.termination = Termination::ReachedHorizon;
  return traj;
}

StateVector interpolate(const Trajectory& traj, double t) {
  if (traj.empty()) throw std::invalid_argument("cannot interpolate an empty trajectory");
  if (t <= traj.times.front()) return traj.states.front();
  if (t >= traj.times.back()) return traj.states.back();
  const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - traj.times.begin());
  const std::size_t lo = hi - 1;
  return hermite(t, traj.times[lo], traj.states[lo], traj.derivs[lo], traj.times[hi],
                 traj.states[hi], traj.derivs[hi]);
}

std::optional<double> find_crossing(const Trajectory& traj, Component component, double level,
                                    CrossingDirection direction, double after) {
  if (!(level >= 0.0)) throw std::invalid_argument("crossing level must be >= 0");
  const int c = static_cast<int>(component);
  const bool down = direction == CrossingDirection::Downward;

  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    if (traj.times[i + 1] <= after) continue;
    const double va = traj.states[i][c];
    const double vb = traj.states[i + 1][c];
    const bool bracket = down ? (va >= level && vb < level) : (va <= level && vb > level);
    if (!bracket) continue;

    double lo = traj.times[i];
    double hi = traj.times[i + 1];
    const double tol = (hi - lo) / 1000.0;
    auto below = [&](double tm) {
      const StateVector ym = hermite(tm, traj.times[i], traj.states[i], traj.derivs[i],
                                     traj.times[i + 1], traj.states[i + 1], traj.derivs[i + 1]);
      return ym[c] < level;
    };
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (below(mid) == down) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const double t_cross = 0.5 * (lo + hi);
    if (t_cross > after) return t_cross;
  }
  return std::nullopt;
}

}  // namespace icb
