#pragma once

#include <vector>

#include "thermobeam/dynamics.hpp"
#include "thermobeam/initial_data.hpp"
#include "thermobeam/model.hpp"

namespace thermobeam {

/// Quadrature nodes on [xi_min, xi_max] with weights doubled to account for xi < 0.
struct XiGrid {
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Composite Simpson with `panels` panels (2 * panels + 1 nodes).
  static XiGrid simpson(double xi_min, double xi_max, std::size_t panels);

  std::size_t size() const { return nodes.size(); }
  double weight_sum() const;
};

/// |v|^2 + |u|^2 + |z|^2 + |y|^2 + |theta|^2 + |q|^2 + xi^2 sum p_j.
double state_norm_sq(const FrequencyState& state, double xi);

struct SobolevNorms {
  std::vector<double> times;
  /// norms[k][i] = || d^k U(t_i) / dx^k ||_2.
  std::vector<std::vector<double>> norms;
  double max_cs_excess = 0.0;
};

/// sum_nodes weight |xi|^(2k) |U|^2 per output time, from trajectories on the grid nodes.
std::vector<double> plancherel_norm_sq(const XiGrid& grid, const std::vector<Trajectory>& trajectories, int k);

/// Same from per-node series of state_norm_sq (series[node][time]); fixed node order.
SobolevNorms plancherel_norms(const XiGrid& grid, const std::vector<std::vector<double>>& series,
                              const std::vector<double>& times, int k_max);

/// Integrates the data at every node (zero data skipped) and assembles the norms.
SobolevNorms sobolev_norms(const Model& model, Law law, const InitialDataSpec& spec, const XiGrid& grid,
                           const IntegrationOptions& opts, int k_max, std::size_t workers);

struct DecayFit {
  double exponent = 0.0;
  double log_constant = 0.0;
  double residual = 0.0;  // RMS of log residuals
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t samples = 0;
};

/// Least squares of log(series) against log(1 + t) on [t_lo, t_hi].
/// Throws DomainError on non-positive values or fewer than two samples.
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& series, double t_lo,
                        double t_hi);

/// (1+t)^(-1/8 - k/4) l1 + (1+t)^(-l/s) l2_kl with s = 2 (chi-zero) or 4 (chi-nonzero).
double theorem_bound_shape(double t, int k, int l, double u0_l1, double dkl_u0_l2, Regime regime);

struct TheoremBoundCheck {
  double c_cal = 0.0;      // ratio at t_cal
  double c_fit = 0.0;      // max ratio on [t_cal, t_hi]
  double worst_t = 0.0;
  double growth = 0.0;     // c_fit / c_cal
  bool pass = false;
};

/// Ratio norms[k](t) / shape(t) on [t_cal, t_hi]; pass iff it never exceeds
/// `factor` times its value at t_cal. Throws DomainError for a missing norm index.
TheoremBoundCheck verify_theorem_bound(const SobolevNorms& norms, int k, int l, double u0_l1, double dkl_u0_l2,
                                       Regime regime, double t_cal = 10.0, double t_hi = 1000.0,
                                       double factor = 1.05);

struct BandOptions {
  double half_width = 0.5;
  double amplitude = 1.0;
  std::size_t panels = 8;
  double t_budget = 1e8;
  double first_probe = 1e-2;
  double relative_tolerance = 1e-6;
  IntegrationOptions integration{};
};

struct HalfLife {
  double center = 0.0;
  double half_life = 0.0;
  bool censored = false;
  double e0 = 0.0;
};

/// sum over band nodes of weight * E(xi, t) for data on y only.
double band_energy(const Model& model, Law law, double center, double t, const BandOptions& opts);

/// First t with band energy <= half its initial value, by doubling then bisection.
HalfLife band_half_life(const Model& model, Law law, double center, const BandOptions& opts);

struct RegularityLoss {
  std::vector<HalfLife> rows;
  double slope = 0.0;  // of log half-life against log center, uncensored rows
  bool slope_valid = false;
  bool monotone = false;
};

/// Throws DomainError when a band reaches below xi = 1.
RegularityLoss regularity_loss_experiment(const Model& model, Law law, const std::vector<double>& centers,
                                          const BandOptions& opts, std::size_t workers);

}  // namespace thermobeam
