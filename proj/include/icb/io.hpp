#ifndef ICB_IO_HPP
#define ICB_IO_HPP

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "icb/calibration.hpp"
#include "icb/dosing.hpp"

namespace icb {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Effective settings of one run: baseline defaults with the document's
/// overrides applied and validated.
struct RunConfig {
  ModelParams params;
  std::optional<StateVector> initial;  // resolved component overrides
  double signal_seed = 1.0;
  IntegratorConfig integrator;
  MetricsConfig metrics;  // c_star follows params.C_star unless set explicitly
  double horizon = 300.0;

  StateVector start_state() const {
    return initial ? *initial : initial_state(params, signal_seed);
  }
};

struct ParsedConfig {
  RunConfig run;
  std::optional<FitSpec> fit;
  std::optional<DoseSchedule> doses;
  std::optional<std::pair<AxisSpec, AxisSpec>> sweep;
};

/// Parse a JSON config document. Unknown keys are rejected with the
/// offending key named; missing keys take the baseline defaults; merged
/// values are validated. Throws ConfigError with line or key context.
ParsedConfig parse_config_document(const std::string& text);

inline RunConfig parse_config(const std::string& text) {
  return parse_config_document(text).run;
}

ParsedConfig load_config_file(const std::filesystem::path& path);

/// One value formatted with 12 significant digits.
std::string format_number(double v);

/// CSV serialization: header exactly `t,C,A,I,E,S`, one newline-terminated
/// row per sample, 12 significant digits.
std::string emit_csv(const Trajectory& traj);

/// Inverse of emit_csv for tooling and round-trip checks; derivatives are
/// not part of the format and come back zeroed.
Trajectory parse_csv(const std::string& text);

struct PlotSpec {
  std::vector<Component> components{Component::C, Component::A, Component::I, Component::E,
                                    Component::S};
  bool log_y = false;
  int width = 900;
  int height = 520;
  std::string title;
};

/// Standalone SVG line chart: labeled axes, one polyline per selected
/// component, a legend entry per component. Throws std::invalid_argument on
/// an empty trajectory.
std::string emit_svg(const Trajectory& traj, const PlotSpec& spec);

/// Standalone SVG class map: one filled cell per grid point plus a
/// four-class legend.
std::string emit_svg(const RegionMap& map);

using json = nlohmann::json;

json to_json(const ResponseReport& report);
json to_json(const StepStats& stats);
json to_json(const std::vector<SensitivityRow>& rows);
json to_json(const ThresholdResult& result);
json to_json(const RegionMap& map);
json to_json(const FitResult& result);
json to_json(const RcReport& report);
json to_json(const JourneyReport& journey);

inline constexpr int kReportSchemaVersion = 1;

/// Wrap a payload in the versioned report envelope.
json report_envelope(std::string_view kind, json payload);

/// Deterministic serialization (sorted keys, two-space indent, trailing
/// newline).
std::string dump_report(const json& report);

struct OutputBundle {
  std::filesystem::path trajectory_csv;  // empty when the command emits none
  std::filesystem::path report_json;
  std::filesystem::path svg;  // empty unless requested
};

void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace icb

#endif
