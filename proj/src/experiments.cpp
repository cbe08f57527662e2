#include "icb/experiments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace icb {

ResponseReport classify_from(const ModelParams& params, const StateVector& state0,
                             MetricsConfig cfg, const IntegratorConfig& icfg) {
  cfg.c_star = params.C_star;
  validate(cfg);
  const Trajectory traj = integrate(params, state0, 0.0, cfg.horizon, icfg);
  if (traj.termination == Termination::StepFailure) {
    throw std::runtime_error("integration step failure at t = " +
                             std::to_string(traj.times.empty() ? 0.0 : traj.times.back()));
  }
  return classify(traj, cfg);
}

ResponseReport simulate_and_classify(const ModelParams& params, MetricsConfig cfg,
                                     const IntegratorConfig& icfg, double signal_seed) {
  return classify_from(params, initial_state(params, signal_seed), cfg, icfg);
}

std::vector<SensitivityRow> oat_sensitivity(const ModelParams& baseline, double frac,
                                            const MetricsConfig& cfg,
                                            const IntegratorConfig& icfg) {
  validate(baseline);
  const ResponseReport base_report = simulate_and_classify(baseline, cfg, icfg);
  if (base_report.response != ResponseClass::Delayed) {
    throw std::invalid_argument("oat_sensitivity baseline must classify as Delayed, got " +
                                std::string(to_string(base_report.response)));
  }
  const double base_delay = *base_report.delay_length;
  const std::optional<double> base_dormancy = base_report.dormancy_length;

  std::vector<SensitivityRow> rows;
  rows.reserve(param_fields().size());
  for (const auto& field : param_fields()) {
    SensitivityRow row;
    row.param_name = std::string(field.name);
    row.perturbation = frac;
    ModelParams perturbed = baseline;
    perturbed.*(field.member) *= (1.0 + frac);
    try {
      validate(perturbed);
      const ResponseReport report = simulate_and_classify(perturbed, cfg, icfg);
      if (!report.delay_length) {
        row.delta_delay = std::numeric_limits<double>::infinity();
      } else {
        row.delta_delay = (*report.delay_length - base_delay) / base_delay;
      }
      if (base_dormancy && report.dormancy_length) {
        row.delta_dormancy = (*report.dormancy_length - *base_dormancy) / *base_dormancy;
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ThresholdResult find_threshold(const ModelParams& base, std::string_view param_name, double lo,
                               double hi, double resolution, const MetricsConfig& cfg,
                               const IntegratorConfig& icfg) {
  if (!(lo < hi)) throw std::invalid_argument("threshold bracket requires lo < hi");
  if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be > 0");

  auto classify_at = [&](double value) {
    ModelParams p = base;
    param_ref(p, param_name) = value;
    return simulate_and_classify(p, cfg, icfg).response;
  };

  ResponseClass class_lo = classify_at(lo);
  ResponseClass class_hi = classify_at(hi);
  if (class_lo == class_hi) {
    throw std::invalid_argument("threshold endpoints classify identically (" +
                                std::string(to_string(class_lo)) + ")");
  }

  // The interesting jump is between responding and not responding; when one
  // endpoint is NoResponse, track that region's boundary even if a thin
  // band of a third class sits in between.
  const bool track_no_response = (class_lo == ResponseClass::NoResponse) !=
                                 (class_hi == ResponseClass::NoResponse);

  auto side_of_lo = [&](ResponseClass c) {
    if (track_no_response) {
      return (c == ResponseClass::NoResponse) == (class_lo == ResponseClass::NoResponse);
    }
    return c == class_lo;
  };

  const auto [a, b] =
      detail::bisect(lo, hi, resolution, [&](double x) { return side_of_lo(classify_at(x)); });

  ThresholdResult result;
  result.param_name = std::string(param_name);
  result.critical_value = 0.5 * (a + b);
  result.bracket_width = b - a;
  result.class_below = a == lo ? class_lo : classify_at(a);
  result.class_above = b == hi ? class_hi : classify_at(b);
  return result;
}

namespace detail {

std::pair<double, double> bisect(double lo, double hi, double resolution,
                                 const std::function<bool(double)>& pred) {
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (pred(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {lo, hi};
}

}  // namespace detail

double axis_value(const AxisSpec& axis, int i) {
  if (axis.count <= 1) return axis.lo;
  return axis.lo + (axis.hi - axis.lo) * static_cast<double>(i) / static_cast<double>(axis.count - 1);
}

RegionMap region_map(const ModelParams& base, const AxisSpec& axis1, const AxisSpec& axis2,
                     const MetricsConfig& cfg, const IntegratorConfig& icfg) {
  if (axis1.count < 1 || axis2.count < 1) throw std::invalid_argument("grid counts must be >= 1");
  if (!(axis1.lo <= axis1.hi) || !(axis2.lo <= axis2.hi)) {
    throw std::invalid_argument("axis ranges must satisfy lo <= hi");
  }

  RegionMap map;
  map.axis1 = axis1;
  map.axis2 = axis2;
  const std::size_t n1 = static_cast<std::size_t>(axis1.count);
  const std::size_t n2 = static_cast<std::size_t>(axis2.count);
  map.classes.assign(n1 * n2, ResponseClass::NoResponse);
  map.cell_errors.assign(n1 * n2, std::nullopt);
  map.band_width.assign(n2, std::nullopt);

  for (std::size_t i2 = 0; i2 < n2; ++i2) {
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      ModelParams p = base;
      param_ref(p, axis1.param_name) = axis_value(axis1, static_cast<int>(i1));
      param_ref(p, axis2.param_name) = axis_value(axis2, static_cast<int>(i2));
      const std::size_t idx = i2 * n1 + i1;
      try {
        validate(p);
        map.classes[idx] = simulate_and_classify(p, cfg, icfg).response;
      } catch (const std::exception& e) {
        map.cell_errors[idx] = e.what();
      }
    }
  }

  // Delayed extent per row, refined across the bordering cell pairs.
  for (std::size_t i2 = 0; i2 < n2; ++i2) {
    int first = -1;
    int last = -1;
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
      if (map.classes[i2 * n1 + i1] == ResponseClass::Delayed && !map.cell_errors[i2 * n1 + i1]) {
        if (first < 0) first = static_cast<int>(i1);
        last = static_cast<int>(i1);
      }
    }
    if (first < 0) continue;

    ModelParams row_base = base;
    param_ref(row_base, axis2.param_name) = axis_value(axis2, static_cast<int>(i2));
    const double cell = axis1.count > 1
                            ? (axis1.hi - axis1.lo) / static_cast<double>(axis1.count - 1)
                            : 0.0;
    const double resolution = cell > 0.0 ? cell / 1000.0 : 1.0;

    double left = axis_value(axis1, first);
    double right = axis_value(axis1, last);
    try {
      if (first > 0 && map.classes[i2 * n1 + static_cast<std::size_t>(first) - 1] !=
                           ResponseClass::Delayed) {
        left = find_threshold(row_base, axis1.param_name, axis_value(axis1, first - 1),
                              axis_value(axis1, first), resolution, cfg, icfg)
                   .critical_value;
      }
      if (last + 1 < axis1.count &&
          map.classes[i2 * n1 + static_cast<std::size_t>(last) + 1] != ResponseClass::Delayed) {
        right = find_threshold(row_base, axis1.param_name, axis_value(axis1, last),
                               axis_value(axis1, last + 1), resolution, cfg, icfg)
                    .critical_value;
      }
    } catch (const std::exception&) {
      // keep the unrefined cell extents
    }
    map.band_width[i2] = right - left;
  }
  return map;
}

}  // namespace icb
