#include "icb/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace icb {

namespace {

// Index of the last sample with time <= cfg.horizon (trajectories may extend
// past the classification horizon).
std::size_t horizon_end(const Trajectory& traj, const MetricsConfig& cfg) {
  std::size_t n = traj.size();
  while (n > 1 && traj.times[n - 1] > cfg.horizon) --n;
  return n;
}

std::vector<double> crossings(const Trajectory& traj, Component comp, double level,
                              CrossingDirection dir, double t_end) {
  std::vector<double> out;
  double after = -std::numeric_limits<double>::infinity();
  while (auto t = find_crossing(traj, comp, level, dir, after)) {
    if (*t > t_end) break;
    out.push_back(*t);
    after = *t;
  }
  return out;
}

}  // namespace

std::string_view to_string(ResponseClass c) {
  switch (c) {
    case ResponseClass::NoResponse: return "NoResponse";
    case ResponseClass::QuickFull: return "QuickFull";
    case ResponseClass::QuickPartial: return "QuickPartial";
    case ResponseClass::Delayed: return "Delayed";
  }
  return "unknown";
}

ResponseClass response_class_from_name(std::string_view name) {
  for (auto c : {ResponseClass::NoResponse, ResponseClass::QuickFull, ResponseClass::QuickPartial,
                 ResponseClass::Delayed}) {
    if (to_string(c) == name) return c;
  }
  throw std::out_of_range("unknown response class: " + std::string(name));
}

void validate(const MetricsConfig& cfg) {
  if (!(cfg.response_frac > 0.0 && cfg.response_frac < 1.0)) {
    throw std::invalid_argument("response_frac must lie in (0, 1)");
  }
  if (!(cfg.eradication_frac > 0.0 && cfg.eradication_frac < cfg.partial_lo &&
        cfg.partial_lo < cfg.partial_hi && cfg.partial_hi < 1.0)) {
    throw std::invalid_argument(
        "bands must satisfy 0 < eradication_frac < partial_lo < partial_hi < 1");
  }
  if (!(cfg.quick_cutoff > 0.0 && cfg.quick_cutoff < cfg.horizon)) {
    throw std::invalid_argument("quick_cutoff must lie in (0, horizon)");
  }
  if (!(cfg.steadiness_window > 0.0)) throw std::invalid_argument("steadiness_window must be > 0");
  if (!(cfg.steadiness_rel_var > 0.0)) throw std::invalid_argument("steadiness_rel_var must be > 0");
  if (!(cfg.c_star > 0.0)) throw std::invalid_argument("c_star must be > 0");
}

std::optional<double> delay_length(const Trajectory& traj, const MetricsConfig& cfg) {
  if (traj.empty()) return std::nullopt;
  const double level = cfg.response_frac * traj.value(0, Component::C);
  auto t = find_crossing(traj, Component::C, level, CrossingDirection::Downward);
  if (t && *t <= cfg.horizon) return t;
  return std::nullopt;
}

std::optional<double> dormancy_length(const Trajectory& traj, const MetricsConfig& cfg) {
  if (traj.empty()) return std::nullopt;
  const double lo = cfg.eradication_frac * cfg.c_star;
  const double hi = cfg.response_frac * cfg.c_star;
  auto entered = find_crossing(traj, Component::C, lo, CrossingDirection::Downward);
  if (!entered || *entered > cfg.horizon) return std::nullopt;
  auto relapse = find_crossing(traj, Component::C, hi, CrossingDirection::Upward, *entered);
  if (!relapse || *relapse > cfg.horizon) return std::nullopt;
  return *relapse - *entered;
}

std::optional<double> post_treatment_size(const Trajectory& traj, const MetricsConfig& cfg) {
  if (traj.empty()) return std::nullopt;
  const std::size_t n = horizon_end(traj, cfg);
  const double t_end = traj.times[n - 1];
  const double t_begin = t_end - cfg.steadiness_window;
  if (t_begin < traj.times.front()) return std::nullopt;

  double sum = 0.0;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (traj.times[i] < t_begin) continue;
    const double v = traj.value(i, Component::C);
    sum += v;
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double mean = sum / static_cast<double>(count);
  if (!(mean > 0.0)) return std::nullopt;
  if ((mx - mn) / mean >= cfg.steadiness_rel_var) return std::nullopt;
  if (!(mean > cfg.partial_lo * cfg.c_star && mean < cfg.partial_hi * cfg.c_star)) {
    return std::nullopt;
  }
  return mean;
}

std::optional<double> cycle_period(const Trajectory& traj, const MetricsConfig& cfg) {
  if (traj.empty()) return std::nullopt;
  const double level = cfg.response_frac * cfg.c_star;
  const auto down = crossings(traj, Component::C, level, CrossingDirection::Downward, cfg.horizon);
  if (down.size() < 2) return std::nullopt;
  return (down.back() - down.front()) / static_cast<double>(down.size() - 1);
}

std::optional<double> effector_window(const Trajectory& traj, const MetricsConfig& cfg) {
  if (traj.empty()) return std::nullopt;
  const std::size_t n = horizon_end(traj, cfg);

  auto diff = [&](std::size_t i) {
    return traj.value(i, Component::E) - traj.value(i, Component::S);
  };
  // Sample-level zero crossing of E - S, linearly interpolated.
  auto cross_time = [&](std::size_t i) {
    const double da = diff(i);
    const double db = diff(i + 1);
    if (db == da) return traj.times[i];
    const double w = da / (da - db);
    return traj.times[i] + w * (traj.times[i + 1] - traj.times[i]);
  };

  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (diff(i) > 0.0) {
      first = i;
      break;
    }
  }
  if (first == n) return std::nullopt;

  const double t_enter = first == 0 ? traj.times[0] : cross_time(first - 1);
  std::size_t j = first;
  while (j + 1 < n && diff(j + 1) > 0.0) ++j;
  const double t_exit = (j + 1 < n) ? cross_time(j) : traj.times[n - 1];
  return t_exit - t_enter;
}

ResponseReport classify(const Trajectory& traj, const MetricsConfig& cfg) {
  validate(cfg);
  ResponseReport report;
  const auto delay = delay_length(traj, cfg);
  if (!delay) {
    report.response = ResponseClass::NoResponse;
    report.effector_window = effector_window(traj, cfg);
    return report;
  }
  report.delay_length = delay;
  report.effector_window = effector_window(traj, cfg);
  if (*delay > cfg.quick_cutoff) {
    report.response = ResponseClass::Delayed;
    report.dormancy_length = dormancy_length(traj, cfg);
    report.cycle_period = cycle_period(traj, cfg);
    return report;
  }
  if (auto size = post_treatment_size(traj, cfg)) {
    report.response = ResponseClass::QuickPartial;
    report.post_treatment_size = size;
    return report;
  }
  report.response = ResponseClass::QuickFull;
  report.dormancy_length = dormancy_length(traj, cfg);
  report.cycle_period = cycle_period(traj, cfg);
  return report;
}

}  // namespace icb
