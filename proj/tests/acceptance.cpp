// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is written out literally next to its check.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "icb/calibration.hpp"
#include "icb/dosing.hpp"

using namespace icb;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Trajectory run_model(const ModelParams& p, double horizon, const IntegratorConfig& icfg = {}) {
  return integrate(p, initial_state(p), 0.0, horizon, icfg);
}

ModelParams with_beta_gamma(double beta, double gamma) {
  ModelParams p = baseline_params();
  p.beta = beta;
  p.gamma = gamma;
  return p;
}

double min_component(const Trajectory& traj) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& y : traj.states) worst = std::min(worst, y.minCoeff());
  return worst;
}

// --- criteria ---------------------------------------------------------------

Outcome conservation_transient() {
  const Trajectory traj = run_model(baseline_params(), 300.0);
  Outcome out;
  double worst_margin = std::numeric_limits<double>::infinity();
  double at_20 = -1.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times[i];
    const double dev = std::abs(traj.value(i, Component::E) + traj.value(i, Component::S) - 10.0);
    const double bound = 5.0 * std::exp(-t) + 1e-6;
    worst_margin = std::min(worst_margin, bound - dev);
    if (t == 20.0) at_20 = dev;
  }
  out.ok = worst_margin >= 0.0 && at_20 >= 0.0 && at_20 < 1e-6;
  out.detail = "min bound margin " + fmt(worst_margin) + ", |E+S-10| at t=20 " + fmt(at_20);
  return out;
}

Outcome decoupled_oracle() {
  ModelParams p = baseline_params();
  p.beta = 0.0;
  p.gamma = 0.0;
  StateVector y0;
  y0 << 0.0, 1.0, 1.0, 5.0, 5.0;
  IntegratorConfig icfg;
  icfg.rel_tol = 1e-9;
  icfg.abs_tol = 1e-22;  // keeps the error control relative down to e^{-30}
  const Trajectory traj = integrate(p, y0, 0.0, 10.0, icfg);
  Outcome out;
  double worst = 0.0;
  for (double t : {1.0, 5.0, 10.0}) {
    const std::size_t i = static_cast<std::size_t>(std::llround(t / icfg.output_dt));
    const double rel_a =
        std::abs(traj.value(i, Component::A) - std::exp(-p.delta_A * t)) / std::exp(-p.delta_A * t);
    const double rel_i =
        std::abs(traj.value(i, Component::I) - std::exp(-p.delta_I * t)) / std::exp(-p.delta_I * t);
    worst = std::max({worst, rel_a, rel_i});
  }
  out.ok = worst < 1e-6;
  out.detail = "worst relative error " + fmt(worst) + " (bound 1e-6)";
  return out;
}

Outcome response_table() {
  struct Row {
    const char* label;
    double beta, gamma, e_star, r_max;
    ResponseClass expected;
  };
  const Row rows[] = {
      {"no-response", 0.0089988, 37.4168, 5.0, 0.09, ResponseClass::NoResponse},
      {"quick-full", 0.009, 37.4168, 5.5, 0.09, ResponseClass::QuickFull},
      {"quick-partial", 0.0089988, 37.414, 5.0, 1.0, ResponseClass::QuickPartial},
      {"delayed", 0.009, 37.414, 5.0, 0.09, ResponseClass::Delayed},
  };
  Outcome out;
  std::ostringstream detail;
  for (const Row& row : rows) {
    ModelParams p = with_beta_gamma(row.beta, row.gamma);
    p.E_star = row.e_star;
    p.r_max = row.r_max;
    const ResponseReport report = simulate_and_classify(p, MetricsConfig{});
    const bool match = report.response == row.expected;
    out.ok = out.ok && match;
    detail << row.label << "=" << to_string(report.response);
    if (!match) {
      detail << "(want " << to_string(row.expected);
      if (report.delay_length) detail << ", delay " << fmt(*report.delay_length) << "d";
      detail << ")";
    }
    detail << " ";
  }
  out.detail = detail.str();
  return out;
}

Outcome delay_values_and_synergy() {
  const MetricsConfig cfg;
  struct Setting {
    const char* label;
    double beta, gamma, target;
  };
  const Setting settings[] = {
      {"inhibitor-1", 0.009, 37.4168, 150.0},
      {"inhibitor-2", 0.0089988, 37.414, 120.0},
      {"combination", 0.009, 37.414, 60.0},
  };
  double delays[3] = {0, 0, 0};
  Outcome out;
  std::ostringstream detail;
  for (int i = 0; i < 3; ++i) {
    const Trajectory traj = run_model(with_beta_gamma(settings[i].beta, settings[i].gamma), 400.0);
    const auto d = delay_length(traj, cfg);
    if (!d) {
      out.ok = false;
      detail << settings[i].label << "=none ";
      continue;
    }
    delays[i] = *d;
    const bool in_band = std::abs(*d - settings[i].target) <= 0.25 * settings[i].target;
    out.ok = out.ok && in_band;
    detail << settings[i].label << "=" << fmt(*d) << "d ";
  }
  const bool ordered = delays[2] < delays[1] && delays[1] < delays[0];
  out.ok = out.ok && ordered;
  detail << (ordered ? "(combination < inhibitor-2 < inhibitor-1)" : "(ordering violated)");
  out.detail = detail.str();
  return out;
}

Outcome dormancy_and_cycles() {
  MetricsConfig cfg;
  cfg.horizon = 1095.0;  // three years
  const Trajectory traj = run_model(baseline_params(), 1095.0);
  const auto dorm = dormancy_length(traj, cfg);
  Outcome out;
  if (!dorm) {
    return {false, "no dormancy found"};
  }
  out.ok = std::abs(*dorm - 180.0) <= 60.0;

  std::vector<double> crossings;
  double after = -1.0;
  while (auto t = find_crossing(traj, Component::C, 0.5 * cfg.c_star,
                                CrossingDirection::Downward, after)) {
    crossings.push_back(*t);
    after = *t;
  }
  std::ostringstream detail;
  detail << "dormancy " << fmt(*dorm) << "d, cycles " << crossings.size() - 1;
  if (crossings.size() < 3) {
    out.ok = false;
    detail << " (need >= 2)";
  } else {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
    for (std::size_t i = 1; i < crossings.size(); ++i) {
      const double period = crossings[i] - crossings[i - 1];
      lo = std::min(lo, period);
      hi = std::max(hi, period);
      sum += period;
    }
    const double spread = (hi - lo) / (sum / static_cast<double>(crossings.size() - 1));
    out.ok = out.ok && spread < 0.05;
    detail << ", period spread " << fmt(spread) << " (bound 0.05)";
  }
  out.detail = detail.str();
  return out;
}

Outcome sensitivity_signs() {
  const auto rows = oat_sensitivity(baseline_params(), 0.01, MetricsConfig{});
  auto row = [&](std::string_view name) -> const SensitivityRow& {
    for (const auto& r : rows) {
      if (r.param_name == name) return r;
    }
    throw std::logic_error("missing row");
  };
  Outcome out;
  std::ostringstream detail;
  for (const char* name : {"kappa", "delta_A", "delta_I", "S_star", "gamma"}) {
    if (!(row(name).delta_delay > 0.0)) {
      out.ok = false;
      detail << name << " not lengthening ";
    }
  }
  for (const char* name : {"r_C", "C_star", "r_A", "r_I", "r_E", "E_star", "beta"}) {
    if (!(row(name).delta_delay < 0.0)) {
      out.ok = false;
      detail << name << " not shortening ";
    }
  }
  const double beta_mag = std::abs(row("beta").delta_delay);
  const double gamma_mag = std::abs(row("gamma").delta_delay);
  if (!(beta_mag >= 0.25) || !(gamma_mag >= 0.25)) out.ok = false;
  detail << "|beta| " << fmt(beta_mag) << ", |gamma| " << fmt(gamma_mag);

  double worst_dorm = 0.0;
  for (const auto& r : rows) {
    if (r.param_name == "r_max" || !r.delta_dormancy) continue;
    worst_dorm = std::max(worst_dorm, std::abs(*r.delta_dormancy));
  }
  if (!(worst_dorm <= 0.10)) out.ok = false;
  detail << ", worst non-r_max |dormancy delta| " << fmt(worst_dorm);
  out.detail = detail.str();
  return out;
}

Outcome critical_threshold() {
  const MetricsConfig cfg;
  const ThresholdResult upper =
      find_threshold(baseline_params(), "gamma", 37.40, 37.45, 1e-4, cfg);
  Outcome out;
  out.ok = upper.critical_value >= 37.41 && upper.critical_value <= 37.43 &&
           upper.class_below == ResponseClass::Delayed &&
           upper.class_above == ResponseClass::NoResponse;

  const ThresholdResult lower = find_threshold(baseline_params(), "gamma", 37.40,
                                               upper.critical_value - 5e-4, 1e-4, cfg);
  const double band = upper.critical_value - lower.critical_value;
  const bool thin = band > 0.0 && band < 0.001 * upper.critical_value;
  out.ok = out.ok && thin;
  out.detail = "critical " + fmt(upper.critical_value) + " (" +
               std::string(to_string(upper.class_below)) + "/" +
               std::string(to_string(upper.class_above)) + "), delayed band " + fmt(band) + " = " +
               fmt(100.0 * band / upper.critical_value) + "% (bound 0.1%)";
  return out;
}

Outcome integrator_robustness() {
  const MetricsConfig cfg;
  IntegratorConfig base;
  IntegratorConfig halved;
  halved.rel_tol = base.rel_tol / 2.0;
  halved.abs_tol = base.abs_tol / 2.0;
  const Trajectory t1 = run_model(baseline_params(), 1095.0, base);
  const Trajectory t2 = run_model(baseline_params(), 1095.0, halved);
  const auto d1 = delay_length(t1, cfg);
  const auto d2 = delay_length(t2, cfg);
  Outcome out;
  if (!d1 || !d2) return {false, "baseline delay missing"};
  const double rel_shift = std::abs(*d1 - *d2) / *d1;
  out.ok = rel_shift < 0.001;

  double worst = min_component(t1);
  worst = std::min(worst, min_component(run_model(with_beta_gamma(0.0089988, 37.4168), 3650.0)));
  {
    ModelParams quick = with_beta_gamma(0.009, 37.4168);
    quick.E_star = 5.5;
    worst = std::min(worst, min_component(run_model(quick, 400.0)));
  }
  out.ok = out.ok && worst >= 0.0;

  const auto window = effector_window(t1, cfg);
  if (!window || !(*window < 2.0)) out.ok = false;
  out.detail = "delay shift " + fmt(rel_shift) + " (bound 1e-3), min state " + fmt(worst) +
               ", effector window " + (window ? fmt(*window) + "d" : "none") + " (bound 2d)";
  return out;
}

Outcome calibration_roundtrip() {
  FitSpec spec;
  spec.free_params = {"beta", "gamma"};
  spec.bounds = {{0.0088, 0.0092}, {37.40, 37.43}};
  spec.init = {0.009, 37.4145};
  spec.target_delay = 60.0;
  spec.max_evals = 500;
  spec.tol_days = 1.0;
  const FitResult result = fit_delay(spec, baseline_params(), MetricsConfig{});
  Outcome out;
  out.ok = result.converged && result.evals <= 500 &&
           std::abs(result.achieved_delay - 60.0) <= 1.0;
  out.detail = "achieved " + fmt(result.achieved_delay) + "d in " + std::to_string(result.evals) +
               " evals, status " + std::string(to_string(result.status));
  return out;
}

Outcome dosing_equivalences() {
  const MetricsConfig cfg;
  Outcome out;
  std::ostringstream detail;

  // Empty schedule against plain integration, sample for sample.
  {
    const ModelParams p = baseline_params();
    const StateVector y0 = initial_state(p);
    const auto [dosed, journey] = simulate_with_doses(p, y0, {}, 120.0, cfg);
    const Trajectory plain = integrate(p, y0, 0.0, 120.0);
    double worst = 0.0;
    bool same_shape = dosed.size() == plain.size();
    if (same_shape) {
      for (std::size_t i = 0; i < dosed.size(); ++i) {
        worst = std::max(worst, (dosed.states[i] - plain.states[i]).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(dosed.times[i] - plain.times[i]));
      }
    }
    const bool ok = same_shape && worst == 0.0;
    out.ok = out.ok && ok;
    detail << "empty-schedule max diff " << fmt(worst) << "; ";
  }

  // A time-zero dose against starting from the post-dose parameters.
  {
    const ModelParams patient = with_beta_gamma(0.0089988, 37.4168);
    const StateVector y0 = initial_state(patient);
    const Dose dose{0.0, 0.0000012, 0.0028};
    DoseSchedule schedule;
    schedule.doses = {dose};
    const auto [dosed, journey] = simulate_with_doses(patient, y0, schedule, 120.0, cfg);
    const Trajectory plain = integrate(apply_dose(patient, dose), y0, 0.0, 120.0);
    double worst = 0.0;
    bool same_shape = dosed.size() == plain.size();
    if (same_shape) {
      for (std::size_t i = 0; i < dosed.size(); ++i) {
        const double scale = std::max(1.0, plain.states[i].cwiseAbs().maxCoeff());
        worst = std::max(worst,
                         (dosed.states[i] - plain.states[i]).cwiseAbs().maxCoeff() / scale);
      }
    }
    const IntegratorConfig icfg;
    const double bound = 10.0 * (icfg.abs_tol + icfg.rel_tol);
    const bool ok = same_shape && worst <= bound;
    out.ok = out.ok && ok;
    detail << "t=0-dose max rel diff " << fmt(worst) << "; ";
  }

  // The five journey labels against thresholds measured from the model.
  {
    const ThresholdResult beta_onset = find_threshold(with_beta_gamma(0.009, 37.4168), "beta",
                                                      0.00899, 0.00901, 1e-7, cfg);
    const ThresholdResult beta_quick = find_threshold(with_beta_gamma(0.009, 37.4168), "beta",
                                                      beta_onset.critical_value + 1e-6, 0.0092,
                                                      1e-7, cfg);
    const ThresholdResult gamma_onset =
        find_threshold(baseline_params(), "gamma", 37.40, 37.45, 1e-4, cfg);
    const ThresholdResult gamma_quick = find_threshold(
        baseline_params(), "gamma", 37.40, gamma_onset.critical_value - 5e-4, 1e-4, cfg);

    ThresholdBand band;
    band.beta_hat = beta_onset.critical_value;
    band.band_beta = beta_quick.critical_value - beta_onset.critical_value;
    band.gamma_hat = gamma_onset.critical_value;
    band.band_gamma = gamma_onset.critical_value - gamma_quick.critical_value;

    const double g = band.gamma_hat - 2.0 * band.band_gamma;  // quick side of gamma
    const double b_lo = band.beta_hat - 3e-4;
    const double b_in = band.beta_hat + 0.3 * band.band_beta;
    const double b_in2 = band.beta_hat + 0.6 * band.band_beta;
    const double b_hi = band.beta_hat + 3.0 * band.band_beta;

    const std::pair<std::pair<double, double>, char> cases[] = {
        {{b_lo, band.beta_hat - 1.5e-4}, 'a'}, {{b_lo, b_in}, 'b'}, {{b_lo, b_hi}, 'c'},
        {{b_in, b_in2}, 'd'},                  {{b_in, b_hi}, 'e'},
    };
    std::string labels;
    bool ok = true;
    for (const auto& [move, expected] : cases) {
      const char got = to_label(journey_case({move.first, g}, {move.second, g}, band));
      labels += got;
      ok = ok && got == expected;
    }
    out.ok = out.ok && ok;
    detail << "journey labels " << labels << " (want abcde)";
  }
  out.detail = detail.str();
  return out;
}

Outcome property_suite() {
  Outcome out;
  std::ostringstream detail;

  // Totality and determinism over randomized parameters near the baseline.
  {
    std::mt19937 rng(20240611);
    std::uniform_real_distribution<double> jitter(0.9, 1.1);
    std::vector<ModelParams> sets;
    for (int k = 0; k < 200; ++k) {
      ModelParams p = baseline_params();
      for (const auto& f : param_fields()) p.*(f.member) *= jitter(rng);
      sets.push_back(p);
    }
    int classified = 0;
    bool deterministic = true;
    std::vector<ResponseClass> first;
    for (const auto& p : sets) {
      const ResponseReport r = simulate_and_classify(p, MetricsConfig{});
      first.push_back(r.response);
      ++classified;
    }
    for (int k = 0; k < 200; k += 10) {
      const ResponseReport again =
          simulate_and_classify(sets[static_cast<std::size_t>(k)], MetricsConfig{});
      deterministic = deterministic && again.response == first[static_cast<std::size_t>(k)];
    }
    out.ok = out.ok && classified == 200 && deterministic;
    detail << "classified 200/200" << (deterministic ? ", deterministic" : ", NONDETERMINISTIC")
           << "; ";
  }

  // Monotone treatment response along rays through the baseline.
  {
    const MetricsConfig cfg;
    auto delay_of = [&](const ModelParams& p) {
      const auto d = delay_length(run_model(p, cfg.horizon), cfg);
      return d ? *d : std::numeric_limits<double>::infinity();
    };
    bool beta_monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10; ++k) {
      ModelParams p = baseline_params();
      p.beta *= 0.995 + 0.001 * k;  // increasing recruitment
      const double d = delay_of(p);
      if (d > prev * (1.0 + 1e-9) + 1e-9) beta_monotone = false;
      prev = d;
    }
    bool gamma_monotone = true;
    prev = 0.0;
    for (int k = 0; k < 10; ++k) {
      ModelParams p = baseline_params();
      p.gamma *= 0.9995 + 0.0001 * k;  // increasing suppression
      const double d = delay_of(p);
      if (d < prev * (1.0 - 1e-9) - 1e-9) gamma_monotone = false;
      prev = d;
    }
    out.ok = out.ok && beta_monotone && gamma_monotone;
    detail << "beta ray " << (beta_monotone ? "non-increasing" : "VIOLATED") << ", gamma ray "
           << (gamma_monotone ? "non-decreasing" : "VIOLATED") << "; ";
  }

  // Bisection correctness on synthetic predicates.
  {
    bool ok = true;
    for (double boundary : {0.125, 2.5, 9.75}) {
      auto pred = [&](double x) { return x < boundary; };
      const auto [lo, hi] = detail::bisect(0.0, 10.0, 1e-6, pred);
      ok = ok && hi - lo <= 1e-6 && lo <= boundary && hi >= boundary;
    }
    const auto [l1, h1] = detail::bisect(0.0, 8.0, 1e-3, [](double x) { return x < 3.3; });
    const auto [l2, h2] = detail::bisect(0.0, 8.0, 5e-4, [](double x) { return x < 3.3; });
    ok = ok && std::abs((h2 - l2) - (h1 - l1) / 2.0) < 1e-12;
    out.ok = out.ok && ok;
    detail << "bisection " << (ok ? "exact" : "BROKEN");
  }
  out.detail = detail.str();
  return out;
}

}  // namespace

int main() {
  // The growth-rate ambiguity is resolved empirically up front; every
  // criterion below uses the winning value through the baseline defaults.
  const RcReport rc = resolve_rc({150.0, 120.0, 60.0}, MetricsConfig{});
  std::printf("info  resolved r_C = %.1f (score %.4g vs %.4g for r_C = 30)\n", rc.resolved_r_c,
              rc.low.score, rc.high.score);

  const std::vector<Criterion> criteria = {
      {"conservation-transient", conservation_transient},
      {"decoupled-analytic-oracle", decoupled_oracle},
      {"response-type-table", response_table},
      {"delay-values-and-synergy", delay_values_and_synergy},
      {"dormancy-and-cycles", dormancy_and_cycles},
      {"sensitivity-signs", sensitivity_signs},
      {"critical-threshold", critical_threshold},
      {"integrator-robustness", integrator_robustness},
      {"calibration-roundtrip", calibration_roundtrip},
      {"dosing-equivalences", dosing_equivalences},
      {"property-suite", property_suite},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    if (!outcome.ok) ++failures;
    std::printf("%s %2zu %-26s %s\n", outcome.ok ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(),
                outcome.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures;
}
