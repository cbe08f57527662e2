#include "icb/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace icb {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

struct Objective {
  const FitSpec& spec;
  const ModelParams& base;
  const MetricsConfig& cfg;
  const IntegratorConfig& icfg;
  int evals = 0;
  bool any_feasible = false;

  ModelParams params_at(const std::vector<double>& x) const {
    ModelParams p = base;
    for (std::size_t i = 0; i < spec.free_params.size(); ++i) {
      param_ref(p, spec.free_params[i]) = x[i];
    }
    return p;
  }

  std::optional<double> delay_at(const ModelParams& p) {
    MetricsConfig mcfg = cfg;
    mcfg.c_star = p.C_star;
    const Trajectory traj = integrate(p, initial_state(p), 0.0, mcfg.horizon, icfg);
    return delay_length(traj, mcfg);
  }

  double operator()(const std::vector<double>& x) {
    ++evals;
    const auto delay = delay_at(params_at(x));
    if (!delay) return cfg.horizon * cfg.horizon;
    any_feasible = true;
    const double r = *delay - spec.target_delay;
    return r * r;
  }
};

}  // namespace

void validate(const FitSpec& spec, const MetricsConfig& cfg) {
  if (spec.free_params.size() != spec.bounds.size() ||
      spec.free_params.size() != spec.init.size()) {
    throw std::invalid_argument("free_params, bounds and init must have matching lengths");
  }
  for (std::size_t i = 0; i < spec.free_params.size(); ++i) {
    const auto [lo, hi] = spec.bounds[i];
    if (!(lo < hi)) {
      throw std::invalid_argument("bounds for " + spec.free_params[i] + " must satisfy lo < hi");
    }
    if (!(spec.init[i] >= lo && spec.init[i] <= hi)) {
      throw std::invalid_argument("init for " + spec.free_params[i] + " must lie within bounds");
    }
  }
  if (!(spec.target_delay > 0.0 && spec.target_delay < cfg.horizon)) {
    throw std::invalid_argument("target_delay must lie in (0, horizon)");
  }
  if (!(spec.tol_days > 0.0)) throw std::invalid_argument("tol_days must be > 0");
  if (spec.max_evals <= 0) throw std::invalid_argument("max_evals must be > 0");
}

std::string_view to_string(FitStatus s) {
  switch (s) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxEvals: return "max-evals";
    case FitStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

FitResult fit_delay(const FitSpec& spec, const ModelParams& base, const MetricsConfig& cfg,
                    const IntegratorConfig& icfg) {
  validate(base);
  validate(spec, cfg);

  Objective objective{spec, base, cfg, icfg};
  const std::size_t n = spec.free_params.size();
  std::vector<double> residual_history;

  auto finish = [&](const std::vector<double>& x) {
    FitResult result;
    result.fitted = objective.params_at(x);
    result.residual_history = residual_history;
    const auto delay = objective.delay_at(result.fitted);  // verification run
    result.achieved_delay = delay ? *delay : std::numeric_limits<double>::infinity();
    result.evals = objective.evals;
    result.converged = delay && std::abs(*delay - spec.target_delay) <= spec.tol_days;
    if (!objective.any_feasible && !delay) {
      result.status = FitStatus::Infeasible;
    } else {
      result.status = result.converged ? FitStatus::Converged : FitStatus::MaxEvals;
    }
    return result;
  };

  if (n == 0) return finish({});

  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::clamp(x[i], spec.bounds[i].first, spec.bounds[i].second);
    }
  };

  // Initial simplex: the starting point plus one vertex per coordinate,
  // stepped inward when the nudge would leave the bounds.
  std::vector<std::vector<double>> vertex(n + 1, spec.init);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = spec.bounds[i];
    const double step = 0.05 * (hi - lo);
    double moved = spec.init[i] + step;
    if (moved > hi) moved = spec.init[i] - step;
    vertex[i + 1][i] = moved;
    clamp(vertex[i + 1]);
  }

  std::vector<double> fval(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fval[i] = objective(vertex[i]);

  const double target_sq = spec.tol_days * spec.tol_days;

  auto order = [&]() {
    std::vector<std::size_t> idx(n + 1);
    std::iota(idx.begin(), idx.end(), 0u);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return fval[a] < fval[b]; });
    std::vector<std::vector<double>> v2(n + 1);
    std::vector<double> f2(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      v2[k] = vertex[idx[k]];
      f2[k] = fval[idx[k]];
    }
    vertex.swap(v2);
    fval.swap(f2);
  };

  order();
  residual_history.push_back(fval[0]);
  while (fval[0] > target_sq && objective.evals < spec.max_evals) {
    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += vertex[k][i];
    }
    for (std::size_t i = 0; i < n; ++i) centroid[i] /= static_cast<double>(n);

    auto along = [&](double coeff) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + coeff * (centroid[i] - vertex[n][i]);
      clamp(x);
      return x;
    };

    const auto reflected = along(kReflect);
    const double f_r = objective(reflected);

    if (f_r < fval[0]) {
      if (objective.evals < spec.max_evals) {
        const auto expanded = along(kExpand);
        const double f_e = objective(expanded);
        if (f_e < f_r) {
          vertex[n] = expanded;
          fval[n] = f_e;
        } else {
          vertex[n] = reflected;
          fval[n] = f_r;
        }
      } else {
        vertex[n] = reflected;
        fval[n] = f_r;
      }
    } else if (f_r < fval[n - 1]) {
      vertex[n] = reflected;
      fval[n] = f_r;
    } else if (objective.evals < spec.max_evals) {
      const bool outside = f_r < fval[n];
      std::vector<double> contracted(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double towards = outside ? reflected[i] : vertex[n][i];
        contracted[i] = centroid[i] + kContract * (towards - centroid[i]);
      }
      clamp(contracted);
      const double f_c = objective(contracted);
      if (f_c < std::min(f_r, fval[n])) {
        vertex[n] = contracted;
        fval[n] = f_c;
      } else {
        for (std::size_t k = 1; k <= n && objective.evals < spec.max_evals; ++k) {
          for (std::size_t i = 0; i < n; ++i) {
            vertex[k][i] = vertex[0][i] + kShrink * (vertex[k][i] - vertex[0][i]);
          }
          clamp(vertex[k]);
          fval[k] = objective(vertex[k]);
        }
      }
    }
    order();
    residual_history.push_back(fval[0]);

    // Collapsed simplex cannot improve further.
    double spread = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        spread = std::max(spread, std::abs(vertex[k][i] - vertex[0][i]));
      }
    }
    if (spread < 1e-14 && fval[n] - fval[0] < 1e-12 * (1.0 + fval[0])) break;
  }

  return finish(vertex[0]);
}

RcReport resolve_rc(const std::array<double, 3>& targets, const MetricsConfig& cfg,
                    const IntegratorConfig& icfg) {
  struct Setting {
    const char* label;
    double beta;
    double gamma;
  };
  constexpr std::array<Setting, 3> kSettings = {{
      {"inhibitor-1", 0.009, 37.4168},
      {"inhibitor-2", 0.0089988, 37.414},
      {"combination", 0.009, 37.414},
  }};

  auto evaluate = [&](double r_c) {
    RcCandidate cand;
    cand.r_c = r_c;
    cand.score = 0.0;
    for (std::size_t i = 0; i < kSettings.size(); ++i) {
      ModelParams p = baseline_params();
      p.r_C = r_c;
      p.beta = kSettings[i].beta;
      p.gamma = kSettings[i].gamma;
      MetricsConfig mcfg = cfg;
      mcfg.c_star = p.C_star;
      const Trajectory traj = integrate(p, initial_state(p), 0.0, mcfg.horizon, icfg);
      RcSettingDelay entry;
      entry.label = kSettings[i].label;
      entry.beta = kSettings[i].beta;
      entry.gamma = kSettings[i].gamma;
      entry.delay = delay_length(traj, mcfg);
      cand.score += entry.delay ? std::abs(*entry.delay - targets[i]) / targets[i]
                                : std::numeric_limits<double>::infinity();
      cand.settings[i] = std::move(entry);
    }
    return cand;
  };

  RcReport report;
  report.target_delays = targets;
  report.low = evaluate(1.0);
  report.high = evaluate(30.0);
  report.resolved_r_c = report.low.score <= report.high.score ? 1.0 : 30.0;
  return report;
}

}  // namespace icb
