// Command-line front end for the checkpoint-blockade response toolkit.

#include <filesystem>
#include <cmath>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "icb/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  bool svg = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_svg = true) {
  cmd->add_option("--config", opts.config_path, "JSON config file (defaults apply when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "output directory (created if missing)");
  if (with_svg) cmd->add_flag("--svg", opts.svg, "also emit an SVG figure");
}

icb::ParsedConfig load(const CommonOpts& opts) {
  if (opts.config_path.empty()) return icb::parse_config_document("");
  return icb::load_config_file(opts.config_path);
}

fs::path ensure_out(const CommonOpts& opts) {
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  return dir;
}

void announce(const icb::OutputBundle& bundle) {
  if (!bundle.trajectory_csv.empty()) std::cout << "wrote " << bundle.trajectory_csv.string() << "\n";
  std::cout << "wrote " << bundle.report_json.string() << "\n";
  if (!bundle.svg.empty()) std::cout << "wrote " << bundle.svg.string() << "\n";
}

std::vector<icb::Component> parse_vars(const std::string& vars) {
  std::vector<icb::Component> components;
  std::string token;
  std::istringstream in(vars);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) components.push_back(icb::component_from_name(token));
  }
  if (components.empty()) throw std::invalid_argument("--vars selected no components");
  return components;
}

int run_simulate(const CommonOpts& opts, const std::string& vars, bool log_y) {
  const auto cfg = load(opts);
  const auto& run = cfg.run;
  const icb::Trajectory traj =
      icb::integrate(run.params, run.start_state(), 0.0, run.horizon, run.integrator);
  const fs::path dir = ensure_out(opts);

  icb::OutputBundle bundle;
  bundle.trajectory_csv = dir / "trajectory.csv";
  icb::write_file(bundle.trajectory_csv, icb::emit_csv(traj));

  icb::json payload{{"horizon", run.horizon},
                    {"samples", traj.size()},
                    {"termination", std::string(icb::to_string(traj.termination))},
                    {"step_stats", icb::to_json(traj.step_stats)}};
  icb::json final_state = icb::json::object();
  for (int i = 0; i < icb::kStateDim; ++i) {
    final_state[std::string(icb::component_name(static_cast<icb::Component>(i)))] =
        traj.states.back()[i];
  }
  payload["final_state"] = std::move(final_state);
  bundle.report_json = dir / "report.json";
  icb::write_file(bundle.report_json, icb::dump_report(icb::report_envelope("simulate", payload)));

  if (opts.svg) {
    icb::PlotSpec plot;
    plot.components = parse_vars(vars);
    plot.log_y = log_y;
    plot.title = "model trajectory";
    bundle.svg = dir / "trajectory.svg";
    icb::write_file(bundle.svg, icb::emit_svg(traj, plot));
  }
  announce(bundle);
  if (traj.termination != icb::Termination::ReachedHorizon) {
    std::cerr << "error: integration ended early (" << icb::to_string(traj.termination) << ")\n";
    return 1;
  }
  return 0;
}

int run_classify(const CommonOpts& opts) {
  const auto cfg = load(opts);
  const auto& run = cfg.run;
  icb::MetricsConfig mcfg = run.metrics;
  const icb::Trajectory traj =
      icb::integrate(run.params, run.start_state(), 0.0, mcfg.horizon, run.integrator);
  if (traj.termination != icb::Termination::ReachedHorizon) {
    std::cerr << "error: integration ended early (" << icb::to_string(traj.termination) << ")\n";
    return 1;
  }
  const icb::ResponseReport report = icb::classify(traj, mcfg);

  const fs::path dir = ensure_out(opts);
  icb::OutputBundle bundle;
  bundle.trajectory_csv = dir / "trajectory.csv";
  icb::write_file(bundle.trajectory_csv, icb::emit_csv(traj));
  bundle.report_json = dir / "report.json";
  icb::write_file(bundle.report_json,
                  icb::dump_report(icb::report_envelope("classify", icb::to_json(report))));
  if (opts.svg) {
    icb::PlotSpec plot;
    plot.components = {icb::Component::C};
    plot.title = "tumour burden";
    bundle.svg = dir / "trajectory.svg";
    icb::write_file(bundle.svg, icb::emit_svg(traj, plot));
  }
  std::cout << "class " << icb::to_string(report.response);
  if (report.delay_length) std::cout << ", delay " << icb::format_number(*report.delay_length);
  std::cout << "\n";
  announce(bundle);
  return 0;
}

int run_sensitivity(const CommonOpts& opts, double frac) {
  const auto cfg = load(opts);
  const auto rows = icb::oat_sensitivity(cfg.run.params, frac, cfg.run.metrics, cfg.run.integrator);

  const fs::path dir = ensure_out(opts);
  std::string csv = "param,perturbation,delta_delay,delta_dormancy,error\n";
  for (const auto& row : rows) {
    csv += row.param_name;
    csv += ',';
    csv += icb::format_number(row.perturbation);
    csv += ',';
    csv += std::isinf(row.delta_delay) ? "inf" : icb::format_number(row.delta_delay);
    csv += ',';
    csv += row.delta_dormancy ? icb::format_number(*row.delta_dormancy) : "";
    csv += ',';
    csv += row.error ? *row.error : "";
    csv += '\n';
  }
  icb::OutputBundle bundle;
  bundle.trajectory_csv = dir / "sensitivity.csv";
  icb::write_file(bundle.trajectory_csv, csv);
  bundle.report_json = dir / "report.json";
  icb::write_file(bundle.report_json,
                  icb::dump_report(icb::report_envelope("sensitivity", icb::to_json(rows))));
  announce(bundle);
  return 0;
}

int run_threshold(const CommonOpts& opts, const std::string& param, double lo, double hi,
                  double resolution) {
  const auto cfg = load(opts);
  const auto result =
      icb::find_threshold(cfg.run.params, param, lo, hi, resolution, cfg.run.metrics,
                          cfg.run.integrator);
  const fs::path dir = ensure_out(opts);
  icb::OutputBundle bundle;
  bundle.report_json = dir / "report.json";
  icb::write_file(bundle.report_json,
                  icb::dump_report(icb::report_envelope("threshold", icb::to_json(result))));
  std::cout << "critical " << param << " = " << icb::format_number(result.critical_value) << " ("
            << icb::to_string(result.class_below) << " / " << icb::to_string(result.class_above)
            << ")\n";
  announce(bundle);
  return 0;
}

int run_sweep(const CommonOpts& opts) {
  const auto cfg = load(opts);
  if (!cfg.sweep) {
    throw icb::ConfigError("sweep requires a \"sweep\" section in the config");
  }
  const auto& [axis1, axis2] = *cfg.sweep;
  const icb::RegionMap map =
      icb::region_map(cfg.run.params, axis1, axis2, cfg.run.metrics, cfg.run.integrator);

  const fs::path dir = ensure_out(opts);
  std::string csv = axis2.param_name + "," + axis1.param_name + ",class\n";
  for (int i2 = 0; i2 < axis2.count; ++i2) {
    for (int i1 = 0; i1 < axis1.count; ++i1) {
      csv += icb::format_number(icb::axis_value(axis2, i2));
      csv += ',';
      csv += icb::format_number(icb::axis_value(axis1, i1));
      csv += ',';
      csv += icb::to_string(map.at(i1, i2));
      csv += '\n';
    }
  }
  icb::OutputBundle bundle;
  bundle.trajectory_csv = dir / "region.csv";
  icb::write_file(bundle.trajectory_csv, csv);
  bundle.report_json = dir / "report.json";
  icb::write_file(bundle.report_json,
                  icb::dump_report(icb::report_envelope("sweep", icb::to_json(map))));
  if (opts.svg) {
    bundle.svg = dir / "region.svg";
    icb::write_file(bundle.svg, icb::emit_svg(map));
  }
  announce(bundle);
  return 0;
}

int run_fit(const CommonOpts& opts) {
  const auto cfg = load(opts);
  if (!cfg.fit) throw icb::ConfigError("fit requires a \"fit\" section in the config");
  const icb::FitResult result =
      icb::fit_delay(*cfg.fit, cfg.run.params, cfg.run.metrics, cfg.run.integrator);

  const fs::path dir = ensure_out(opts);
  icb::OutputBundle bundle;
  bundle.report_json = dir / "report.json";
  icb::write_file(bundle.report_json,
                  icb::dump_report(icb::report_envelope("fit", icb::to_json(result))));
  std::cout << "fit " << icb::to_string(result.status) << ", achieved delay "
            << icb::format_number(result.achieved_delay) << " in " << result.evals << " evals\n";
  announce(bundle);
  return result.status == icb::FitStatus::Infeasible ? 1 : 0;
}

int run_dose(const CommonOpts& opts) {
  const auto cfg = load(opts);
  if (!cfg.doses) throw icb::ConfigError("dose requires a \"doses\" section in the config");
  const auto& run = cfg.run;
  auto [traj, journey] = icb::simulate_with_doses(run.params, run.start_state(), *cfg.doses,
                                                  run.horizon, run.metrics, run.integrator);

  const fs::path dir = ensure_out(opts);
  icb::OutputBundle bundle;
  bundle.trajectory_csv = dir / "trajectory.csv";
  icb::write_file(bundle.trajectory_csv, icb::emit_csv(traj));
  bundle.report_json = dir / "report.json";
  icb::write_file(bundle.report_json,
                  icb::dump_report(icb::report_envelope("dose", icb::to_json(journey))));
  if (opts.svg) {
    icb::PlotSpec plot;
    plot.components = {icb::Component::C};
    plot.title = "tumour burden under dosing";
    bundle.svg = dir / "trajectory.svg";
    icb::write_file(bundle.svg, icb::emit_svg(traj, plot));
  }
  std::cout << "final class " << icb::to_string(journey.final_report.response) << "\n";
  announce(bundle);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"five-variable tumour/T-cell checkpoint-blockade response toolkit"};
  app.require_subcommand(1);

  CommonOpts sim_opts;
  std::string sim_vars = "C,A,I,E,S";
  bool sim_log_y = false;
  auto* sim = app.add_subcommand("simulate", "integrate the model and write the trajectory");
  add_common(sim, sim_opts);
  sim->add_option("--vars", sim_vars, "comma-separated components for the SVG figure");
  sim->add_flag("--log-y", sim_log_y, "logarithmic y axis for the SVG figure");

  CommonOpts cls_opts;
  auto* cls = app.add_subcommand("classify", "simulate and classify the response");
  add_common(cls, cls_opts);

  CommonOpts sen_opts;
  double sen_frac = 0.01;
  auto* sen = app.add_subcommand("sensitivity", "one-at-a-time parameter sensitivities");
  add_common(sen, sen_opts, false);
  sen->add_option("--frac", sen_frac, "signed perturbation fraction (default +0.01)");

  CommonOpts thr_opts;
  std::string thr_param;
  double thr_lo = 0.0, thr_hi = 0.0, thr_resolution = 1e-4;
  auto* thr = app.add_subcommand("threshold", "bisect a response-class boundary");
  add_common(thr, thr_opts, false);
  thr->add_option("param", thr_param, "parameter name")->required();
  thr->add_option("lo", thr_lo, "bracket low end")->required();
  thr->add_option("hi", thr_hi, "bracket high end")->required();
  thr->add_option("--resolution", thr_resolution, "bracket width to reach");

  CommonOpts swp_opts;
  auto* swp = app.add_subcommand("sweep", "response classes over a 2-D parameter grid");
  add_common(swp, swp_opts);

  CommonOpts fit_opts;
  auto* fit = app.add_subcommand("fit", "fit free parameters to a target delay");
  add_common(fit, fit_opts, false);

  CommonOpts dose_opts;
  auto* dose = app.add_subcommand("dose", "piecewise integration across a dose schedule");
  add_common(dose, dose_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(sim_opts, sim_vars, sim_log_y);
    if (cls->parsed()) return run_classify(cls_opts);
    if (sen->parsed()) return run_sensitivity(sen_opts, sen_frac);
    if (thr->parsed()) return run_threshold(thr_opts, thr_param, thr_lo, thr_hi, thr_resolution);
    if (swp->parsed()) return run_sweep(swp_opts);
    if (fit->parsed()) return run_fit(fit_opts);
    if (dose->parsed()) return run_dose(dose_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
