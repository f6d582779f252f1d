#include "thermobeam/energy.hpp"

#include <cmath>
#include <string>

#include "thermobeam/dynamics.hpp"
#include "thermobeam/error.hpp"

namespace thermobeam {

namespace {

constexpr cplx I{0.0, 1.0};

double re(cplx c) { return c.real(); }

}  // namespace

EnergyBreakdown energy(const FrequencyState& s, double xi, const Model& model, Law law) {
  check_shape(s, law, model.modes());
  const auto& pr = model.params();
  EnergyBreakdown e;
  e.kinetic = pr.rho1 * std::norm(s.u) + pr.rho2 * std::norm(s.y);
  e.elastic = pr.k * std::norm(s.v) + model.a() * std::norm(s.z);
  e.thermal = pr.rho3 * std::norm(s.theta) + (s.q ? pr.tau * std::norm(*s.q) : 0.0);
  e.memory = pr.m * xi * xi * s.second_moment_sum();
  e.total = e.kinetic + e.elastic + e.thermal + e.memory;
  return e;
}

double dissipation_rate(const FrequencyState& s, double xi, const Model& model, Law law) {
  check_shape(s, law, model.modes());
  const auto& pr = model.params();
  const auto& modes = model.kernel().modes;
  double memory = 0.0;
  for (std::size_t j = 0; j < modes.size(); ++j) memory += modes[j].mu * s.p[j];
  const double heat =
      law == Law::Cattaneo ? 2.0 * pr.beta * std::norm(*s.q) : 2.0 * pr.beta_tilde() * xi * xi * std::norm(s.theta);
  return -heat - pr.m * xi * xi * memory;
}

double energy_rate(const FrequencyState& s, double xi, const Model& model, Law law) {
  const FrequencyState d = rhs(s, xi, model, law);
  const auto& pr = model.params();
  double rate = 2.0 * (pr.rho1 * re(std::conj(s.u) * d.u) + pr.rho2 * re(std::conj(s.y) * d.y) +
                       pr.k * re(std::conj(s.v) * d.v) + model.a() * re(std::conj(s.z) * d.z) +
                       pr.rho3 * re(std::conj(s.theta) * d.theta));
  if (s.q) rate += 2.0 * pr.tau * re(std::conj(*s.q) * *d.q);
  rate += pr.m * xi * xi * d.second_moment_sum();
  return rate;
}

double functional_J(int index, const FrequencyState& s, double xi, const Model& model) {
  check_shape(s, Law::Cattaneo, model.modes());
  const auto& pr = model.params();
  const cplx q = *s.q;
  switch (index) {
    case 1: {
      const double chi_shift = pr.rho2 - pr.b * pr.rho1 / pr.k + pr.tau * model.b0() * pr.rho3;
      const double gamma = pr.tau + chi_shift / (pr.delta * pr.delta);
      return -pr.tau * pr.rho2 * re(s.v * std::conj(s.y)) -
             model.a() * pr.tau * pr.rho1 / pr.k * re(s.z * std::conj(s.u)) +
             pr.delta * pr.rho1 / pr.k * gamma * re(s.theta * std::conj(s.u)) -
             pr.tau / pr.delta * chi_shift * re(s.v * std::conj(q));
    }
    case 2:
      return pr.rho1 * re(I * xi * s.v * std::conj(s.u)) + pr.rho2 * re(I * xi * s.y * std::conj(s.z)) +
             pr.delta * pr.tau * re(I * xi * s.z * std::conj(q));
    case 3:
      return -pr.rho2 * xi * xi * re(std::conj(s.y) * s.memory_sum());
    case 4:
      return pr.tau * pr.rho3 * re(I * xi * s.theta * std::conj(q));
    default:
      throw DomainError("J index must be 1..4, got " + std::to_string(index));
  }
}

double functional_K(int index, const FrequencyState& s, double xi, const Model& model) {
  check_shape(s, Law::Fourier, model.modes());
  const auto& pr = model.params();
  switch (index) {
    case 1:
      return -pr.rho2 * re(s.v * std::conj(s.y)) - model.a() * pr.rho1 / pr.k * re(s.z * std::conj(s.u)) +
             model.b0() * pr.rho1 * pr.rho3 / (pr.k * pr.delta) * re(s.theta * std::conj(s.u));
    case 2:
      return pr.rho1 * re(I * xi * std::conj(s.u) * s.v) + pr.rho2 * re(I * xi * s.y * std::conj(s.z));
    case 3:
      return -pr.rho2 * xi * xi * re(std::conj(s.y) * s.memory_sum());
    default:
      throw DomainError("K index must be 1..3, got " + std::to_string(index));
  }
}

double rho(double xi, Regime regime) {
  const double x2 = xi * xi;
  const double base = 1.0 + x2;
  return regime == Regime::ChiZero ? x2 * x2 / (base * base * base) : x2 * x2 / (base * base * base * base);
}

}  // namespace thermobeam
