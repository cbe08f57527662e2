#include "icb/model.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace icb {

namespace {

constexpr std::array<std::string_view, kStateDim> kComponentNames = {"C", "A", "I", "E", "S"};

constexpr std::array<ParamField, 14> kParamFields = {{
    {"r_C", &ModelParams::r_C},
    {"r_max", &ModelParams::r_max},
    {"C_star", &ModelParams::C_star},
    {"kappa", &ModelParams::kappa},
    {"r_A", &ModelParams::r_A},
    {"delta_A", &ModelParams::delta_A},
    {"r_I", &ModelParams::r_I},
    {"delta_I", &ModelParams::delta_I},
    {"r_E", &ModelParams::r_E},
    {"E_star", &ModelParams::E_star},
    {"r_S", &ModelParams::r_S},
    {"S_star", &ModelParams::S_star},
    {"beta", &ModelParams::beta},
    {"gamma", &ModelParams::gamma},
}};

}  // namespace

Component component_from_name(std::string_view name) {
  for (int i = 0; i < kStateDim; ++i) {
    if (kComponentNames[static_cast<std::size_t>(i)] == name) return static_cast<Component>(i);
  }
  throw std::out_of_range("unknown state component: " + std::string(name));
}

std::string_view component_name(Component c) {
  return kComponentNames[static_cast<std::size_t>(static_cast<int>(c))];
}

StateVector initial_state(const ModelParams& p, double signal_seed) {
  if (!(signal_seed >= 0.0)) {
    throw std::invalid_argument("signal_seed must be >= 0");
  }
  StateVector y;
  y << p.C_star, signal_seed, signal_seed, 0.0, p.S_star;
  return y;
}

std::span<const ParamField> param_fields() { return kParamFields; }

double& param_ref(ModelParams& p, std::string_view name) {
  for (const auto& f : kParamFields) {
    if (f.name == name) return p.*(f.member);
  }
  throw std::out_of_range("unknown parameter: " + std::string(name));
}

double param_value(const ModelParams& p, std::string_view name) {
  return param_ref(const_cast<ModelParams&>(p), name);
}

void validate(const ModelParams& p) {
  for (const auto& f : kParamFields) {
    const double v = p.*(f.member);
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("parameter " + std::string(f.name) +
                                  " must be finite and >= 0, got " + std::to_string(v));
    }
  }
  if (!(p.C_star > 0.0)) {
    throw std::invalid_argument("parameter C_star must be > 0");
  }
}

bool is_valid_state(const StateVector& y) noexcept {
  for (int i = 0; i < kStateDim; ++i) {
    if (!std::isfinite(y[i]) || y[i] < 0.0) return false;
  }
  return true;
}

void validate_state(const StateVector& y) {
  for (int i = 0; i < kStateDim; ++i) {
    if (!std::isfinite(y[i]) || y[i] < 0.0) {
      throw std::invalid_argument("state component " +
                                  std::string(kComponentNames[static_cast<std::size_t>(i)]) +
                                  " must be finite and >= 0, got " + std::to_string(y[i]));
    }
  }
}

}  // namespace icb
