#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace thermobeam {

enum class Law { Cattaneo, Fourier };
enum class Regime { ChiZero, ChiNonzero };

std::string to_string(Law law);
std::string to_string(Regime regime);
Law law_from_string(std::string_view name);
Regime regime_from_string(std::string_view name);

/// Coefficients of the beam/heat system. tau = 0 selects the Fourier law.
struct PhysicalParams {
  double rho1 = 1.0;
  double rho2 = 1.0;
  double rho3 = 1.0;
  double k = 1.0;
  double b = 1.0;
  double m = 1.0;
  double delta = 1.0;
  double beta = 1.0;
  double tau = 0.0;

  /// Conductivity of the Fourier law, 1/beta.
  double beta_tilde() const { return 1.0 / beta; }

  /// Throws InvalidParameters unless all coefficients are positive and tau >= 0.
  void validate() const;
};

/// One term g * exp(-mu s) of the memory kernel.
struct KernelMode {
  double g = 0.0;
  double mu = 1.0;
};

/// Memory kernel g(s) = sum_j g_j exp(-mu_j s).
struct MemoryKernel {
  std::vector<KernelMode> modes;

  std::size_t size() const { return modes.size(); }
  bool empty() const { return modes.empty(); }
  /// Total mass b0 = integral of g over [0, inf).
  double mass() const;
  double operator()(double s) const;
  double max_rate() const;
  double min_rate() const;
};

struct KernelReport {
  bool h1 = false;
  bool h2 = false;
  bool h3 = false;
  std::optional<double> k1;  // max decay rate, present iff mode list non-empty
  std::optional<double> k2;  // min decay rate
  double b0 = 0.0;
  double a = 0.0;
};

KernelReport verify_kernel_hypotheses(const MemoryKernel& kernel, const PhysicalParams& params);

/// Parameters paired with a kernel that satisfies (H1)-(H3). Immutable once built.
class Model {
 public:
  /// Throws InvalidParameters for bad coefficients and HypothesisError naming the
  /// violated hypothesis otherwise.
  Model(PhysicalParams params, MemoryKernel kernel);

  const PhysicalParams& params() const { return params_; }
  const MemoryKernel& kernel() const { return kernel_; }
  double b0() const { return b0_; }
  /// Effective elastic modulus a = b - b0.
  double a() const { return a_; }
  std::size_t modes() const { return kernel_.size(); }

  /// Copy with tau replaced.
  Model with_tau(double tau) const;
  Model with_rho2(double rho2) const;

 private:
  PhysicalParams params_;
  MemoryKernel kernel_;
  double b0_;
  double a_;
};

double compute_chi0(const PhysicalParams& params);
double compute_chi0tau(const PhysicalParams& params);

struct StabilityNumbers {
  double chi0 = 0.0;
  double chi0tau = 0.0;
};

StabilityNumbers stability_numbers(const PhysicalParams& params);

/// rho2 making chi_{0,tau} vanish; params.rho2 is ignored.
/// Throws DegenerateDivisor when tau = rho1/(rho3 k).
double solve_rho2_for_chi0tau_zero(const PhysicalParams& params);

inline constexpr double kRegimeTolerance = 1e-10;

/// chi_{0,tau} for Cattaneo, chi_0 for Fourier.
double stability_number(const PhysicalParams& params, Law law);
Regime detect_regime(const PhysicalParams& params, Law law, double tolerance = kRegimeTolerance);

struct Preset {
  std::string name;
  PhysicalParams params;
  MemoryKernel kernel;
};

const std::vector<Preset>& presets();
/// Throws ConfigError for an unknown name.
const Preset& preset(std::string_view name);

}  // namespace thermobeam
