#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "thermobeam/dynamics.hpp"
#include "thermobeam/model.hpp"
#include "thermobeam/state.hpp"

namespace thermobeam {

/// Weights of the three non-trivial functionals (lambda / gamma for Cattaneo,
/// zeta / kappa for Fourier) and the energy multiplier N. The J4 weight is 1.
struct LyapunovCoefficients {
  Regime regime = Regime::ChiZero;
  Law law = Law::Cattaneo;
  std::array<double, 3> weights{1.0, 1.0, 1.0};
  double N = 1.0;

  void validate() const;
};

/// xi-dependent factors multiplying the three weights.
std::array<double, 3> weight_factors(double xi, Regime regime);

struct FunctionalSet {
  double E = 0.0;
  /// J1..J4 (Cattaneo) or K1..K3 (Fourier).
  std::vector<double> functionals;
  double L = 0.0;
  LyapunovCoefficients coefficients;
};

/// Throws RegimeMismatch when coeffs.regime disagrees with the model's stability number.
FunctionalSet assemble_lyapunov(const FrequencyState& state, double xi, const Model& model,
                                const LyapunovCoefficients& coeffs);

/// Recomputes L from the stored functionals and energy.
double recombine(const FunctionalSet& set, double xi);

/// L(x, p) = x^H H x + c_p sum p_j at one wavenumber, with its exact time derivative
/// dL/dt = x^H (A^H H + H A) x + c_p sum_j (x^H S_j x - mu_j p_j).
class LyapunovForm {
 public:
  LyapunovForm(double xi, const Model& model, const LyapunovCoefficients& coeffs);

  double value(const FrequencyState& state) const;
  double rate(const FrequencyState& state) const;
  /// Largest G with dL/dt <= -G rho(xi) L for every admissible state (p_j >= (mu_j/g_j)|w_j|^2);
  /// -inf if L is not positive on that set.
  double certified_gamma() const;

  double xi() const { return xi_; }
  double rho() const { return rho_; }

 private:
  double xi_;
  double rho_;
  StateLayout layout_;
  MemoryKernel kernel_;
  double cp_;
  Eigen::MatrixXcd h_;
  Eigen::MatrixXcd hdot_;
};

/// Hermitian H with f(x) = x^H H x, reconstructed from evaluations by polarization;
/// f must be a real quadratic form of the linear part with p = 0.
Eigen::MatrixXcd polarize(const StateLayout& layout, const std::function<double(const FrequencyState&)>& f);

/// Random admissible state: Gaussian point fields and w_j, p_j >= (mu_j/g_j)|w_j|^2 and
/// equality for about half of the draws.
FrequencyState sample_state(std::mt19937_64& rng, const Model& model, Law law, bool zero_history = false);

struct EquivalenceResult {
  double m2 = 0.0;
  bool pass = false;
  std::size_t samples = 0;
};

/// Equivalence (N - M2)(1+xi^2)^2 E <= L <= (N + M2)(1+xi^2)^2 E on random states.
EquivalenceResult verify_equivalence(const Model& model, const LyapunovCoefficients& coeffs,
                                     const std::vector<double>& xi_grid, std::size_t samples_per_xi,
                                     std::uint64_t seed);

struct RateCheck {
  double gamma = 0.0;  // min over samples of -L' / (rho L)
  double worst_xi = 0.0;
  double worst_t = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

/// Sampled check of dL/dt <= -G rho L over random states on the grid.
RateCheck sampled_rate_check(const Model& model, const LyapunovCoefficients& coeffs,
                             const std::vector<double>& xi_grid, std::size_t samples_per_xi, std::uint64_t seed);

struct CalibrationOptions {
  std::vector<double> xi_grid{0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.5, 5.0, 7.5, 10.0};
  std::size_t samples_per_xi = 1000;
  std::size_t max_sweeps = 40;
  /// Exponent spacing of the initial scan over powers of two.
  int coarse_step = 3;
  int max_exponent = 30;
  std::uint64_t seed = 1;
};

struct CalibrationResult {
  LyapunovCoefficients coefficients;
  double gamma_certified = 0.0;
  double gamma_sampled = 0.0;
  double m2 = 0.0;
  std::size_t sweeps = 0;
};

/// Coarse scan over powers of two, then coordinate doubling/halving of the weights
/// (order: second, first, third, N) that maximises the certified G over the grid, followed by sampled re-verification.
/// Throws CalibrationFailure with the worst wavenumber when no admissible set is found.
CalibrationResult calibrate_coefficients(const Model& model, Law law, Regime regime,
                                         const CalibrationOptions& opts = {});

/// dL/dt <= -G rho L along random trajectories with log-uniform xi in the grid range.
RateCheck certify_trajectories(const Model& model, const LyapunovCoefficients& coeffs,
                               const std::vector<double>& xi_grid, std::size_t trajectories, double t_end,
                               double output_stride, std::uint64_t seed);

}  // namespace thermobeam
