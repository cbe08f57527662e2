#include "icb/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace icb {

namespace {

std::size_t line_of(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

void check_keys(const json& obj, const std::vector<std::string_view>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

const json& expect_object(const json& v, const std::string& where) {
  if (!v.is_object()) throw ConfigError(where + " must be an object");
  return v;
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + " must be a number");
  return v.get<double>();
}

std::int64_t as_integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
  return v.get<std::int64_t>();
}

json opt_num(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// JSON cannot carry IEEE infinities; the report schema spells them out.
json num_or_inf(double v) {
  if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
  return json(v);
}

json params_to_json(const ModelParams& p) {
  json out = json::object();
  for (const auto& f : param_fields()) out[std::string(f.name)] = p.*(f.member);
  return out;
}

AxisSpec parse_axis(const json& v, const std::string& where) {
  expect_object(v, where);
  check_keys(v, {"param", "lo", "hi", "count"}, where);
  AxisSpec axis;
  if (!v.contains("param") || !v["param"].is_string()) {
    throw ConfigError(where + ".param must name a model parameter");
  }
  axis.param_name = v["param"].get<std::string>();
  ModelParams probe;
  try {
    param_ref(probe, axis.param_name);
  } catch (const std::out_of_range&) {
    throw ConfigError("unknown parameter \"" + axis.param_name + "\" in " + where);
  }
  if (!v.contains("lo") || !v.contains("hi")) throw ConfigError(where + " requires lo and hi");
  axis.lo = as_number(v["lo"], where + ".lo");
  axis.hi = as_number(v["hi"], where + ".hi");
  axis.count = v.contains("count") ? static_cast<int>(as_integer(v["count"], where + ".count")) : 2;
  if (axis.count < 1) throw ConfigError(where + ".count must be >= 1");
  return axis;
}

}  // namespace

ParsedConfig parse_config_document(const std::string& text) {
  json doc = json::object();
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (!blank) {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("config parse error at line " + std::to_string(line_of(text, e.byte)) +
                        ": " + e.what());
    }
  }
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(doc,
             {"params", "initial", "signal_seed", "integrator", "metrics", "horizon", "fit",
              "doses", "sweep"},
             "config");

  ParsedConfig out;
  RunConfig& rc = out.run;

  if (doc.contains("params")) {
    const json& p = expect_object(doc["params"], "params");
    std::vector<std::string_view> allowed;
    for (const auto& f : param_fields()) allowed.push_back(f.name);
    check_keys(p, allowed, "params");
    for (const auto& f : param_fields()) {
      const std::string name(f.name);
      if (p.contains(name)) rc.params.*(f.member) = as_number(p[name], "params." + name);
    }
  }
  rc.metrics.c_star = rc.params.C_star;

  if (doc.contains("signal_seed")) {
    rc.signal_seed = as_number(doc["signal_seed"], "signal_seed");
    if (!(rc.signal_seed >= 0.0)) throw ConfigError("signal_seed must be >= 0");
  }

  if (doc.contains("integrator")) {
    const json& g = expect_object(doc["integrator"], "integrator");
    check_keys(g, {"rel_tol", "abs_tol", "h_init", "h_max", "h_min", "max_steps", "output_dt"},
               "integrator");
    auto& ic = rc.integrator;
    if (g.contains("rel_tol")) ic.rel_tol = as_number(g["rel_tol"], "integrator.rel_tol");
    if (g.contains("abs_tol")) ic.abs_tol = as_number(g["abs_tol"], "integrator.abs_tol");
    if (g.contains("h_init")) ic.h_init = as_number(g["h_init"], "integrator.h_init");
    if (g.contains("h_max")) ic.h_max = as_number(g["h_max"], "integrator.h_max");
    if (g.contains("h_min")) ic.h_min = as_number(g["h_min"], "integrator.h_min");
    if (g.contains("max_steps")) ic.max_steps = as_integer(g["max_steps"], "integrator.max_steps");
    if (g.contains("output_dt")) ic.output_dt = as_number(g["output_dt"], "integrator.output_dt");
  }

  if (doc.contains("metrics")) {
    const json& m = expect_object(doc["metrics"], "metrics");
    check_keys(m,
               {"response_frac", "quick_cutoff", "eradication_frac", "partial_band",
                "steadiness_window", "steadiness_rel_var", "horizon", "c_star"},
               "metrics");
    auto& mc = rc.metrics;
    if (m.contains("response_frac")) {
      mc.response_frac = as_number(m["response_frac"], "metrics.response_frac");
    }
    if (m.contains("quick_cutoff")) {
      mc.quick_cutoff = as_number(m["quick_cutoff"], "metrics.quick_cutoff");
    }
    if (m.contains("eradication_frac")) {
      mc.eradication_frac = as_number(m["eradication_frac"], "metrics.eradication_frac");
    }
    if (m.contains("partial_band")) {
      const json& band = m["partial_band"];
      if (!band.is_array() || band.size() != 2) {
        throw ConfigError("metrics.partial_band must be an array [lo, hi]");
      }
      mc.partial_lo = as_number(band[0], "metrics.partial_band[0]");
      mc.partial_hi = as_number(band[1], "metrics.partial_band[1]");
    }
    if (m.contains("steadiness_window")) {
      mc.steadiness_window = as_number(m["steadiness_window"], "metrics.steadiness_window");
    }
    if (m.contains("steadiness_rel_var")) {
      mc.steadiness_rel_var = as_number(m["steadiness_rel_var"], "metrics.steadiness_rel_var");
    }
    if (m.contains("horizon")) mc.horizon = as_number(m["horizon"], "metrics.horizon");
    if (m.contains("c_star")) mc.c_star = as_number(m["c_star"], "metrics.c_star");
  }

  if (doc.contains("horizon")) {
    rc.horizon = as_number(doc["horizon"], "horizon");
    if (!(rc.horizon > 0.0)) throw ConfigError("horizon must be > 0");
  }

  if (doc.contains("initial")) {
    const json& init = expect_object(doc["initial"], "initial");
    check_keys(init, {"C", "A", "I", "E", "S"}, "initial");
    StateVector y = initial_state(rc.params, rc.signal_seed);
    for (int i = 0; i < kStateDim; ++i) {
      const std::string name(component_name(static_cast<Component>(i)));
      if (init.contains(name)) y[i] = as_number(init[name], "initial." + name);
    }
    rc.initial = y;
  }

  if (doc.contains("fit")) {
    const json& f = expect_object(doc["fit"], "fit");
    check_keys(f, {"free_params", "bounds", "init", "target_delay", "max_evals", "tol_days"},
               "fit");
    FitSpec spec;
    if (f.contains("free_params")) {
      if (!f["free_params"].is_array()) throw ConfigError("fit.free_params must be an array");
      for (const auto& name : f["free_params"]) {
        if (!name.is_string()) throw ConfigError("fit.free_params entries must be strings");
        spec.free_params.push_back(name.get<std::string>());
        ModelParams probe;
        try {
          param_ref(probe, spec.free_params.back());
        } catch (const std::out_of_range&) {
          throw ConfigError("unknown parameter \"" + spec.free_params.back() +
                            "\" in fit.free_params");
        }
      }
    }
    if (f.contains("bounds")) {
      if (!f["bounds"].is_array()) throw ConfigError("fit.bounds must be an array of [lo, hi]");
      for (const auto& b : f["bounds"]) {
        if (!b.is_array() || b.size() != 2) throw ConfigError("fit.bounds entries must be [lo, hi]");
        spec.bounds.emplace_back(as_number(b[0], "fit.bounds lo"), as_number(b[1], "fit.bounds hi"));
      }
    } else {
      // Default search ranges exist only for the checkpoint coefficients.
      for (const auto& name : spec.free_params) {
        if (name == "beta") {
          spec.bounds.emplace_back(0.008, 0.009);
        } else if (name == "gamma") {
          spec.bounds.emplace_back(37.414, 37.5);
        } else {
          throw ConfigError("fit.bounds required: no default range for \"" + name + "\"");
        }
      }
    }
    if (f.contains("init")) {
      if (!f["init"].is_array()) throw ConfigError("fit.init must be an array");
      for (const auto& v : f["init"]) spec.init.push_back(as_number(v, "fit.init"));
    } else {
      for (std::size_t i = 0; i < spec.free_params.size(); ++i) {
        const double current = param_value(rc.params, spec.free_params[i]);
        if (i < spec.bounds.size()) {
          spec.init.push_back(std::clamp(current, spec.bounds[i].first, spec.bounds[i].second));
        } else {
          spec.init.push_back(current);
        }
      }
    }
    if (f.contains("target_delay")) {
      spec.target_delay = as_number(f["target_delay"], "fit.target_delay");
    }
    if (f.contains("max_evals")) {
      spec.max_evals = static_cast<int>(as_integer(f["max_evals"], "fit.max_evals"));
    }
    if (f.contains("tol_days")) spec.tol_days = as_number(f["tol_days"], "fit.tol_days");
    out.fit = std::move(spec);
  }

  if (doc.contains("doses")) {
    if (!doc["doses"].is_array()) throw ConfigError("doses must be an array");
    DoseSchedule schedule;
    for (const auto& d : doc["doses"]) {
      expect_object(d, "doses entry");
      check_keys(d, {"time", "delta_beta", "delta_gamma"}, "doses entry");
      Dose dose;
      if (d.contains("time")) dose.time = as_number(d["time"], "doses.time");
      if (d.contains("delta_beta")) dose.delta_beta = as_number(d["delta_beta"], "doses.delta_beta");
      if (d.contains("delta_gamma")) {
        dose.delta_gamma = as_number(d["delta_gamma"], "doses.delta_gamma");
      }
      schedule.doses.push_back(dose);
    }
    out.doses = std::move(schedule);
  }

  if (doc.contains("sweep")) {
    const json& s = expect_object(doc["sweep"], "sweep");
    check_keys(s, {"axis1", "axis2"}, "sweep");
    if (!s.contains("axis1") || !s.contains("axis2")) {
      throw ConfigError("sweep requires axis1 and axis2");
    }
    out.sweep = std::make_pair(parse_axis(s["axis1"], "sweep.axis1"),
                               parse_axis(s["axis2"], "sweep.axis2"));
  }

  try {
    validate(rc.params);
    validate(rc.integrator);
    validate(rc.metrics);
    if (rc.initial) validate_state(*rc.initial);
    if (out.fit) validate(*out.fit, rc.metrics);
    if (out.doses) validate(*out.doses);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return out;
}

ParsedConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_document(buf.str());
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string emit_csv(const Trajectory& traj) {
  std::string out = "t,C,A,I,E,S\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_number(traj.times[i]);
    for (int c = 0; c < kStateDim; ++c) {
      out += ',';
      out += format_number(traj.states[i][c]);
    }
    out += '\n';
  }
  return out;
}

Trajectory parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "t,C,A,I,E,S") {
    throw std::invalid_argument("trajectory CSV must start with header t,C,A,I,E,S");
  }
  Trajectory traj;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    double values[1 + kStateDim];
    for (int k = 0; k < 1 + kStateDim; ++k) {
      if (!std::getline(row, field, ',')) {
        throw std::invalid_argument("trajectory CSV row with fewer than 6 fields: " + line);
      }
      std::size_t used = 0;
      values[k] = std::stod(field, &used);
      if (used != field.size()) {
        throw std::invalid_argument("trajectory CSV field is not a number: " + field);
      }
    }
    if (std::getline(row, field, ',')) {
      throw std::invalid_argument("trajectory CSV row with more than 6 fields: " + line);
    }
    traj.times.push_back(values[0]);
    StateVector y;
    for (int c = 0; c < kStateDim; ++c) y[c] = values[1 + c];
    traj.states.push_back(y);
    traj.derivs.push_back(StateVector::Zero());
  }
  return traj;
}

namespace {

constexpr double kLogFloor = 1e-12;

const char* component_color(Component c) {
  switch (c) {
    case Component::C: return "#4c72b0";
    case Component::A: return "#dd8452";
    case Component::I: return "#55a868";
    case Component::E: return "#c44e52";
    case Component::S: return "#8172b3";
  }
  return "#000000";
}

const char* class_color(ResponseClass c) {
  switch (c) {
    case ResponseClass::NoResponse: return "#c44e52";
    case ResponseClass::QuickFull: return "#55a868";
    case ResponseClass::QuickPartial: return "#dd8452";
    case ResponseClass::Delayed: return "#4c72b0";
  }
  return "#000000";
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<double> linear_ticks(double lo, double hi, int target) {
  std::vector<double> ticks;
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
  double t = std::ceil(lo / step - 1e-9) * step;
  for (; t <= hi + step * 1e-9; t += step) ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  return ticks;
}

struct Frame {
  double width;
  double height;
  double ml = 72, mr = 24, mt = 36, mb = 52;
  double x0, x1, y0, y1;  // data ranges; y already transformed for log axes

  double px(double x) const { return ml + (x - x0) / (x1 - x0) * (width - ml - mr); }
  double py(double y) const { return height - mb - (y - y0) / (y1 - y0) * (height - mt - mb); }
};

void svg_open(std::ostringstream& svg, double w, double h, const std::string& title) {
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"14\">" << title << "</text>\n";
  }
}

void svg_axes(std::ostringstream& svg, const Frame& f, const std::vector<double>& xticks,
              const std::vector<double>& yticks, const std::string& xlabel,
              const std::string& ylabel, bool y_is_log) {
  const double left = f.ml, right = f.width - f.mr, top = f.mt, bottom = f.height - f.mb;
  svg << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(bottom) << "\" x2=\"" << coord(right)
      << "\" y2=\"" << coord(bottom) << "\" stroke=\"#333333\"/>\n";
  svg << "<line x1=\"" << coord(left) << "\" y1=\"" << coord(top) << "\" x2=\"" << coord(left)
      << "\" y2=\"" << coord(bottom) << "\" stroke=\"#333333\"/>\n";
  for (double t : xticks) {
    const double x = f.px(t);
    svg << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(bottom) << "\" x2=\"" << coord(x)
        << "\" y2=\"" << coord(bottom + 5) << "\" stroke=\"#333333\"/>\n";
    svg << "<text x=\"" << coord(x) << "\" y=\"" << coord(bottom + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_text(t)
        << "</text>\n";
  }
  for (double t : yticks) {
    const double y = f.py(t);
    svg << "<line x1=\"" << coord(left - 5) << "\" y1=\"" << coord(y) << "\" x2=\"" << coord(left)
        << "\" y2=\"" << coord(y) << "\" stroke=\"#333333\"/>\n";
    const double label = y_is_log ? std::pow(10.0, t) : t;
    svg << "<text x=\"" << coord(left - 8) << "\" y=\"" << coord(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_text(label)
        << "</text>\n";
  }
  svg << "<text x=\"" << coord((left + right) / 2) << "\" y=\"" << coord(f.height - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
      << "</text>\n";
  svg << "<text x=\"16\" y=\"" << coord((top + bottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << coord((top + bottom) / 2) << ")\">" << ylabel << "</text>\n";
}

}  // namespace

std::string emit_svg(const Trajectory& traj, const PlotSpec& spec) {
  if (traj.empty()) throw std::invalid_argument("cannot plot an empty trajectory");
  if (spec.components.empty()) throw std::invalid_argument("no components selected for plotting");

  Frame f;
  f.width = spec.width;
  f.height = spec.height;
  f.x0 = traj.times.front();
  f.x1 = traj.times.back() > f.x0 ? traj.times.back() : f.x0 + 1.0;

  double vmax = 0.0;
  double vmin_pos = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    for (Component c : spec.components) {
      const double v = traj.value(i, c);
      vmax = std::max(vmax, v);
      if (v > kLogFloor) vmin_pos = std::min(vmin_pos, v);
    }
  }
  std::vector<double> yticks;
  bool log_y = spec.log_y;
  if (log_y) {
    if (!std::isfinite(vmin_pos)) vmin_pos = kLogFloor;
    f.y0 = std::floor(std::log10(std::max(vmin_pos, kLogFloor)));
    f.y1 = std::ceil(std::log10(std::max(vmax, vmin_pos * 10)));
    if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;
    const int decades = static_cast<int>(f.y1 - f.y0);
    const int step = std::max(1, (decades + 7) / 8);
    for (int d = 0; d <= decades; d += step) yticks.push_back(f.y0 + d);
  } else {
    f.y0 = 0.0;
    f.y1 = vmax > 0.0 ? vmax * 1.05 : 1.0;
    yticks = linear_ticks(f.y0, f.y1, 5);
  }

  std::ostringstream svg;
  svg_open(svg, f.width, f.height, spec.title);
  svg_axes(svg, f, linear_ticks(f.x0, f.x1, 6), yticks, "time (days)",
           log_y ? "concentration (log scale)" : "concentration", log_y);

  for (Component c : spec.components) {
    svg << "<polyline fill=\"none\" stroke=\"" << component_color(c)
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < traj.size(); ++i) {
      double v = traj.value(i, c);
      if (log_y) v = std::log10(std::max(v, kLogFloor));
      svg << coord(f.px(traj.times[i])) << ',' << coord(f.py(std::min(std::max(v, f.y0), f.y1)));
      if (i + 1 < traj.size()) svg << ' ';
    }
    svg << "\"/>\n";
  }

  double ly = f.mt + 8;
  const double lx = f.width - f.mr - 90;
  for (Component c : spec.components) {
    svg << "<rect x=\"" << coord(lx) << "\" y=\"" << coord(ly) << "\" width=\"12\" height=\"12\" fill=\""
        << component_color(c) << "\"/>\n";
    svg << "<text x=\"" << coord(lx + 18) << "\" y=\"" << coord(ly + 10)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << component_name(c) << "</text>\n";
    ly += 18;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string emit_svg(const RegionMap& map) {
  if (map.classes.empty()) throw std::invalid_argument("cannot plot an empty region map");

  Frame f;
  f.width = 760;
  f.height = 560;
  f.mr = 150;  // room for the class legend
  const int n1 = map.axis1.count;
  const int n2 = map.axis2.count;
  f.x0 = 0;
  f.x1 = n1;
  f.y0 = 0;
  f.y1 = n2;

  std::ostringstream svg;
  svg_open(svg, f.width, f.height,
           map.axis1.param_name + " / " + map.axis2.param_name + " response map");

  const double cell_w = (f.width - f.ml - f.mr) / n1;
  const double cell_h = (f.height - f.mt - f.mb) / n2;
  for (int i2 = 0; i2 < n2; ++i2) {
    for (int i1 = 0; i1 < n1; ++i1) {
      const std::size_t idx =
          static_cast<std::size_t>(i2) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(i1);
      const char* color = map.cell_errors[idx] ? "#cccccc" : class_color(map.classes[idx]);
      const double x = f.ml + i1 * cell_w;
      const double y = f.height - f.mb - (i2 + 1) * cell_h;
      svg << "<rect x=\"" << coord(x) << "\" y=\"" << coord(y) << "\" width=\"" << coord(cell_w)
          << "\" height=\"" << coord(cell_h) << "\" fill=\"" << color << "\"/>\n";
    }
  }

  // Border and axis labels with end-point tick values.
  svg << "<rect x=\"" << coord(f.ml) << "\" y=\"" << coord(f.mt) << "\" width=\""
      << coord(f.width - f.ml - f.mr) << "\" height=\"" << coord(f.height - f.mt - f.mb)
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << coord(f.ml) << "\" y=\"" << coord(f.height - f.mb + 18)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick_text(map.axis1.lo) << "</text>\n";
  svg << "<text x=\"" << coord(f.width - f.mr) << "\" y=\"" << coord(f.height - f.mb + 18)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick_text(map.axis1.count > 1 ? map.axis1.hi : map.axis1.lo) << "</text>\n";
  svg << "<text x=\"" << coord((f.ml + f.width - f.mr) / 2) << "\" y=\""
      << coord(f.height - 14) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << map.axis1.param_name << "</text>\n";
  svg << "<text x=\"" << coord(f.ml - 8) << "\" y=\"" << coord(f.height - f.mb)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick_text(map.axis2.lo) << "</text>\n";
  svg << "<text x=\"" << coord(f.ml - 8) << "\" y=\"" << coord(f.mt + 10)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
      << tick_text(map.axis2.count > 1 ? map.axis2.hi : map.axis2.lo) << "</text>\n";
  svg << "<text x=\"16\" y=\"" << coord((f.mt + f.height - f.mb) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << coord((f.mt + f.height - f.mb) / 2) << ")\">" << map.axis2.param_name << "</text>\n";

  double ly = f.mt + 8;
  const double lx = f.width - f.mr + 16;
  for (auto c : {ResponseClass::NoResponse, ResponseClass::QuickFull, ResponseClass::QuickPartial,
                 ResponseClass::Delayed}) {
    svg << "<rect x=\"" << coord(lx) << "\" y=\"" << coord(ly) << "\" width=\"12\" height=\"12\" fill=\""
        << class_color(c) << "\"/>\n";
    svg << "<text x=\"" << coord(lx + 18) << "\" y=\"" << coord(ly + 10)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << to_string(c) << "</text>\n";
    ly += 18;
  }
  svg << "</svg>\n";
  return svg.str();
}

json to_json(const ResponseReport& report) {
  return json{{"class", std::string(to_string(report.response))},
              {"delay_length", opt_num(report.delay_length)},
              {"dormancy_length", opt_num(report.dormancy_length)},
              {"post_treatment_size", opt_num(report.post_treatment_size)},
              {"cycle_period", opt_num(report.cycle_period)},
              {"effector_window", opt_num(report.effector_window)}};
}

json to_json(const StepStats& stats) {
  return json{{"accepted", stats.accepted},
              {"rejected", stats.rejected},
              {"rhs_evals", stats.rhs_evals}};
}

json to_json(const std::vector<SensitivityRow>& rows) {
  json arr = json::array();
  for (const auto& row : rows) {
    json entry{{"param", row.param_name},
               {"perturbation", row.perturbation},
               {"delta_delay", num_or_inf(row.delta_delay)},
               {"delta_dormancy", opt_num(row.delta_dormancy)}};
    entry["error"] = row.error ? json(*row.error) : json(nullptr);
    arr.push_back(std::move(entry));
  }
  return arr;
}

json to_json(const ThresholdResult& result) {
  return json{{"param", result.param_name},
              {"critical_value", result.critical_value},
              {"bracket_width", result.bracket_width},
              {"class_below", std::string(to_string(result.class_below))},
              {"class_above", std::string(to_string(result.class_above))}};
}

namespace {
json axis_to_json(const AxisSpec& axis) {
  return json{{"param", axis.param_name}, {"lo", axis.lo}, {"hi", axis.hi}, {"count", axis.count}};
}
}  // namespace

json to_json(const RegionMap& map) {
  json classes = json::array();
  json errors = json::array();
  for (int i2 = 0; i2 < map.axis2.count; ++i2) {
    json row = json::array();
    json err_row = json::array();
    for (int i1 = 0; i1 < map.axis1.count; ++i1) {
      const std::size_t idx = static_cast<std::size_t>(i2) * static_cast<std::size_t>(map.axis1.count) +
                              static_cast<std::size_t>(i1);
      row.push_back(std::string(to_string(map.classes[idx])));
      err_row.push_back(map.cell_errors[idx] ? json(*map.cell_errors[idx]) : json(nullptr));
    }
    classes.push_back(std::move(row));
    errors.push_back(std::move(err_row));
  }
  json widths = json::array();
  for (const auto& w : map.band_width) widths.push_back(opt_num(w));
  return json{{"axis1", axis_to_json(map.axis1)},
              {"axis2", axis_to_json(map.axis2)},
              {"classes", std::move(classes)},
              {"cell_errors", std::move(errors)},
              {"band_width", std::move(widths)}};
}

json to_json(const FitResult& result) {
  return json{{"fitted", params_to_json(result.fitted)},
              {"achieved_delay", num_or_inf(result.achieved_delay)},
              {"evals", result.evals},
              {"converged", result.converged},
              {"status", std::string(to_string(result.status))}};
}

json to_json(const RcReport& report) {
  auto candidate = [](const RcCandidate& c) {
    json settings = json::array();
    for (const auto& s : c.settings) {
      settings.push_back(json{{"label", s.label},
                              {"beta", s.beta},
                              {"gamma", s.gamma},
                              {"delay", opt_num(s.delay)}});
    }
    return json{{"r_C", c.r_c}, {"settings", std::move(settings)}, {"score", num_or_inf(c.score)}};
  };
  return json{{"targets", report.target_delays},
              {"candidates", json::array({candidate(report.low), candidate(report.high)})},
              {"resolved_r_C", report.resolved_r_c}};
}

json to_json(const JourneyReport& journey) {
  json snapshots = json::array();
  for (const auto& s : journey.snapshots) {
    snapshots.push_back(json{{"time", s.time},
                             {"beta", s.beta},
                             {"gamma", s.gamma},
                             {"projected_class", std::string(to_string(s.projected))}});
  }
  return json{{"snapshots", std::move(snapshots)}, {"final", to_json(journey.final_report)}};
}

json report_envelope(std::string_view kind, json payload) {
  return json{{"schema", "icb-report"},
              {"schema_version", kReportSchemaVersion},
              {"kind", std::string(kind)},
              {"result", std::move(payload)}};
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace icb
