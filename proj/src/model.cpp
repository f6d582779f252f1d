#include "thermobeam/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermobeam/error.hpp"

namespace thermobeam {

std::string to_string(Law law) { return law == Law::Cattaneo ? "cattaneo" : "fourier"; }

std::string to_string(Regime regime) { return regime == Regime::ChiZero ? "chi-zero" : "chi-nonzero"; }

Law law_from_string(std::string_view name) {
  if (name == "cattaneo") return Law::Cattaneo;
  if (name == "fourier") return Law::Fourier;
  throw ConfigError("unknown law '" + std::string(name) + "' (expected cattaneo or fourier)");
}

Regime regime_from_string(std::string_view name) {
  if (name == "chi-zero") return Regime::ChiZero;
  if (name == "chi-nonzero") return Regime::ChiNonzero;
  throw ConfigError("unknown regime '" + std::string(name) + "' (expected chi-zero or chi-nonzero)");
}

void PhysicalParams::validate() const {
  const std::pair<const char*, double> positive[] = {{"rho1", rho1}, {"rho2", rho2}, {"rho3", rho3},
                                                     {"k", k},       {"b", b},       {"m", m},
                                                     {"delta", delta}, {"beta", beta}};
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw InvalidParameters(std::string(name) + " must be a positive finite number");
    }
  }
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidParameters("tau must be non-negative");
}

double MemoryKernel::mass() const {
  double total = 0.0;
  for (const auto& mode : modes) total += mode.g / mode.mu;
  return total;
}

double MemoryKernel::operator()(double s) const {
  double value = 0.0;
  for (const auto& mode : modes) value += mode.g * std::exp(-mode.mu * s);
  return value;
}

double MemoryKernel::max_rate() const {
  double r = 0.0;
  for (const auto& mode : modes) r = std::max(r, mode.mu);
  return r;
}

double MemoryKernel::min_rate() const {
  if (modes.empty()) return 0.0;
  double r = std::numeric_limits<double>::infinity();
  for (const auto& mode : modes) r = std::min(r, mode.mu);
  return r;
}

KernelReport verify_kernel_hypotheses(const MemoryKernel& kernel, const PhysicalParams& params) {
  KernelReport report;
  report.h1 = std::all_of(kernel.modes.begin(), kernel.modes.end(),
                          [](const KernelMode& m) { return m.g > 0.0 && std::isfinite(m.g); });
  report.h2 = std::all_of(kernel.modes.begin(), kernel.modes.end(),
                          [](const KernelMode& m) { return m.mu > 0.0 && std::isfinite(m.mu); });
  if (!kernel.empty() && report.h2) {
    report.k1 = kernel.max_rate();
    report.k2 = kernel.min_rate();
  }
  report.b0 = (report.h1 && report.h2) ? kernel.mass() : std::numeric_limits<double>::infinity();
  report.a = params.b - report.b0;
  report.h3 = std::isfinite(report.b0) && report.a > 0.0;
  return report;
}

Model::Model(PhysicalParams params, MemoryKernel kernel) : params_(params), kernel_(std::move(kernel)) {
  params_.validate();
  const KernelReport report = verify_kernel_hypotheses(kernel_, params_);
  if (!report.h1) throw HypothesisError("H1", "kernel amplitudes g_j must be positive");
  if (!report.h2) throw HypothesisError("H2", "kernel decay rates mu_j must be positive");
  if (!report.h3) {
    throw HypothesisError("H3", "a = b - b0 must be positive (b=" + std::to_string(params_.b) +
                                    ", b0=" + std::to_string(report.b0) + ")");
  }
  b0_ = report.b0;
  a_ = report.a;
}

Model Model::with_tau(double tau) const {
  PhysicalParams p = params_;
  p.tau = tau;
  return Model(p, kernel_);
}

Model Model::with_rho2(double rho2) const {
  PhysicalParams p = params_;
  p.rho2 = rho2;
  return Model(p, kernel_);
}

double compute_chi0(const PhysicalParams& p) { return p.rho2 - p.b * p.rho1 / p.k; }

double compute_chi0tau(const PhysicalParams& p) {
  const double thermal = p.rho1 / (p.rho3 * p.k);
  return (p.tau - thermal) * compute_chi0(p) - p.tau * thermal * p.delta * p.delta;
}

StabilityNumbers stability_numbers(const PhysicalParams& params) {
  return {compute_chi0(params), compute_chi0tau(params)};
}

double solve_rho2_for_chi0tau_zero(const PhysicalParams& p) {
  const double thermal = p.rho1 / (p.rho3 * p.k);
  const double divisor = p.tau - thermal;
  if (divisor == 0.0) {
    throw DegenerateDivisor("tau equals rho1/(rho3 k); chi_{0,tau} = 0 has no finite rho2 solution");
  }
  return p.b * p.rho1 / p.k + p.tau * thermal * p.delta * p.delta / divisor;
}

double stability_number(const PhysicalParams& params, Law law) {
  return law == Law::Cattaneo ? compute_chi0tau(params) : compute_chi0(params);
}

Regime detect_regime(const PhysicalParams& params, Law law, double tolerance) {
  return std::abs(stability_number(params, law)) < tolerance ? Regime::ChiZero : Regime::ChiNonzero;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = [] {
    PhysicalParams base;
    base.rho1 = base.rho3 = base.k = base.delta = base.b = 1.0;
    base.m = 1.0;
    base.beta = 1.0;
    base.tau = 2.0;
    const MemoryKernel kernel{{{0.5, 1.0}}};
    PhysicalParams zero = base;
    zero.rho2 = 3.0;
    PhysicalParams nonzero = base;
    nonzero.rho2 = 1.0;
    return std::vector<Preset>{{"regime-zero", zero, kernel}, {"regime-nonzero", nonzero, kernel}};
  }();
  return table;
}

const Preset& preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace thermobeam
