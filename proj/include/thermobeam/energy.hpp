#pragma once

#include "thermobeam/model.hpp"
#include "thermobeam/state.hpp"

namespace thermobeam {

struct EnergyBreakdown {
  double kinetic = 0.0;  // rho1 |u|^2 + rho2 |y|^2
  double elastic = 0.0;  // k |v|^2 + a |z|^2
  double thermal = 0.0;  // rho3 |theta|^2 + tau |q|^2
  double memory = 0.0;   // m xi^2 sum p_j
  double total = 0.0;
};

EnergyBreakdown energy(const FrequencyState& state, double xi, const Model& model, Law law);

/// Closed-form dE/dt: -2 beta |q|^2 (or -2 xi^2 |theta|^2 / beta) - m xi^2 sum mu_j p_j.
double dissipation_rate(const FrequencyState& state, double xi, const Model& model, Law law);

/// dE/dt by the chain rule through the right-hand side.
double energy_rate(const FrequencyState& state, double xi, const Model& model, Law law);

/// Cattaneo functionals J1..J4. Throws DomainError for other indices.
double functional_J(int index, const FrequencyState& state, double xi, const Model& model);
/// Fourier functionals K1..K3.
double functional_K(int index, const FrequencyState& state, double xi, const Model& model);

/// Envelope exponent in E(t) <= C exp(-lambda rho(xi) t) E(0); same for both laws.
double rho(double xi, Regime regime);

}  // namespace thermobeam
