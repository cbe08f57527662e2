#ifndef ICB_MODEL_HPP
#define ICB_MODEL_HPP

#include <Eigen/Core>

#include <algorithm>
#include <span>
#include <string_view>

namespace icb {

inline constexpr int kStateDim = 5;

// Component order of the state vector: cancer burden, antigen presentation,
// inflammation, effector T cells, non-effector T cells.
enum class Component : int { C = 0, A = 1, I = 2, E = 3, S = 4 };

Component component_from_name(std::string_view name);
std::string_view component_name(Component c);

template <typename Scalar>
using StateVectorT = Eigen::Matrix<Scalar, kStateDim, 1>;

using StateVector = StateVectorT<double>;
using StateDerivative = StateVector;

/// Rate and scale constants of the five-variable tumour/checkpoint model.
/// Defaults are the baseline estimates; units are days, cells/nL,
/// peptides/nL and ng/nL throughout.
template <typename Scalar>
struct ModelParamsT {
  Scalar r_C = Scalar(1.0);        // logistic growth rate of cancer, 1/day
  Scalar r_max = Scalar(0.09);     // maximum growth rate of cancer, 1/day
  Scalar C_star = Scalar(1000.0);  // cancer steady-state concentration, cells/nL
  Scalar kappa = Scalar(1.2);      // T-cell kill rate of cancer, nL/(cells*day)
  Scalar r_A = Scalar(0.5);        // antigen source rate per unit cancer
  Scalar delta_A = Scalar(0.8);    // antigen degradation rate, 1/day
  Scalar r_I = Scalar(0.4);        // inflammation source rate, (ng*nL)/(cells^2*day)
  Scalar delta_I = Scalar(3.0);    // inflammation degradation rate, 1/day
  Scalar r_E = Scalar(1.0);        // effector T-cell relaxation rate, 1/day
  Scalar E_star = Scalar(5.0);     // effector T-cell base steady state, cells/nL
  Scalar r_S = Scalar(1.0);        // non-effector T-cell relaxation rate, 1/day
  Scalar S_star = Scalar(5.0);     // non-effector T-cell base steady state, cells/nL
  Scalar beta = Scalar(0.009);     // effector recruitment coefficient (CTLA-4 proxy)
  Scalar gamma = Scalar(37.414);   // effector suppression coefficient (PD-1 proxy)
};

using ModelParams = ModelParamsT<double>;

/// Baseline parameter set (the combination-treatment fit).
inline ModelParams baseline_params() { return ModelParams{}; }

/// Saturating cancer growth rate min{ r_C (1 - C/C*), r_max }.
/// Negative above C*; the cap binds below C* (1 - r_max/r_C).
template <typename Scalar>
Scalar growth_rate(Scalar c, const ModelParamsT<Scalar>& p) {
  using std::min;
  return min(p.r_C * (Scalar(1) - c / p.C_star), p.r_max);
}

/// Right-hand side of the model. The activation and suppression bilinears
/// are evaluated once and enter dE and dS with opposite signs, so
/// dE + dS = -r_E (E - E*) - r_S (S - S*) holds to rounding error.
template <typename Scalar>
StateVectorT<Scalar> rhs(const StateVectorT<Scalar>& y, const ModelParamsT<Scalar>& p) {
  const Scalar c = y[0];
  const Scalar a = y[1];
  const Scalar infl = y[2];
  const Scalar e = y[3];
  const Scalar s = y[4];
  const Scalar activation = p.beta * a * infl * e * s;  // g(A,I,E) S = beta*A*I*E*S
  const Scalar suppression = p.gamma * e * s;
  StateVectorT<Scalar> dy;
  dy[0] = growth_rate(c, p) * c - p.kappa * c * e;
  dy[1] = p.r_A * c - p.delta_A * a;
  dy[2] = p.r_I * c * e - p.delta_I * infl;
  dy[3] = -p.r_E * (e - p.E_star) + activation - suppression;
  dy[4] = -p.r_S * (s - p.S_star) - activation + suppression;
  return dy;
}

/// Standard initial condition: tumour at steady state, escaped immune
/// system (E = 0, S = S*), signals seeded at a low level.
StateVector initial_state(const ModelParams& p, double signal_seed = 1.0);

/// Name/member table over the 14 parameter fields, in declaration order.
struct ParamField {
  std::string_view name;
  double ModelParams::*member;
};

std::span<const ParamField> param_fields();

/// Reference to a parameter field by name; throws std::out_of_range for
/// unknown names.
double& param_ref(ModelParams& p, std::string_view name);
double param_value(const ModelParams& p, std::string_view name);

/// Throw std::invalid_argument naming the offending field if any parameter
/// is non-finite or negative, or if C_star is not positive.
void validate(const ModelParams& p);

bool is_valid_state(const StateVector& y) noexcept;
void validate_state(const StateVector& y);

}  // namespace icb

#endif
