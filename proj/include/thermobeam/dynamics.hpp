#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "thermobeam/model.hpp"
#include "thermobeam/state.hpp"

namespace thermobeam {

FrequencyState rhs_cattaneo(const FrequencyState& state, double xi, const Model& model);
FrequencyState rhs_fourier(const FrequencyState& state, double xi, const Model& model);
FrequencyState rhs(const FrequencyState& state, double xi, const Model& model, Law law);

/// Generator A of the linear part x' = A x, x = (v, u, z, y, theta, [q], w).
Eigen::MatrixXcd system_matrix(double xi, const Model& model, Law law);
double spectral_radius(const Eigen::MatrixXcd& a);

struct IntegrationOptions {
  double t_end = 10.0;
  double dt_max = 1e-2;
  double output_stride = 0.1;
  /// Step cap h <= c_stab / (1 + |xi|) and h <= c_stab / spectral radius.
  double c_stab = 0.05;
  InvariantTolerance tolerance{};

  void validate() const;
};

/// Number of equal RK4 substeps used to cover `span` at wavenumber xi.
std::size_t substeps(double span, double xi, const Model& model, Law law, const IntegrationOptions& opts);

/// Exact composition of RK4 steps on (x, p): x -> M x, p_j -> R_j p_j + x^H Q_j x.
class Propagator {
 public:
  static Propagator identity(const StateLayout& layout);
  static Propagator rk4_step(const Eigen::MatrixXcd& a, const StateLayout& layout, const MemoryKernel& kernel,
                             double h);
  /// Propagator for n equal RK4 steps of size span / n.
  static Propagator rk4(double xi, const Model& model, Law law, double span, std::size_t n);

  /// This step followed by `next`.
  Propagator then(const Propagator& next) const;
  Propagator power(std::size_t n) const;

  FrequencyState apply(const FrequencyState& state) const;
  void apply(Eigen::VectorXcd& x, std::vector<double>& p) const;

  const Eigen::MatrixXcd& matrix() const { return m_; }

 private:
  StateLayout layout_;
  Eigen::MatrixXcd m_;
  Eigen::VectorXd r_;
  std::vector<Eigen::MatrixXcd> q_;
};

/// Reference integrator: n classical RK4 steps of size h through rhs().
FrequencyState rk4_reference(const FrequencyState& initial, double xi, const Model& model, Law law, double h,
                             std::size_t n);

struct Trajectory {
  double xi = 0.0;
  Law law = Law::Cattaneo;
  std::vector<double> times;
  std::vector<FrequencyState> states;
  double max_cs_excess = -std::numeric_limits<double>::infinity();

  std::size_t size() const { return times.size(); }
};

using StateVisitor = std::function<void(std::size_t index, double t, const FrequencyState& state)>;

/// Output times k * output_stride, k = 0..round(t_end / output_stride). Returns the
/// largest Cauchy-Schwarz excess seen. Throws DivergenceError / InvariantViolation.
double integrate_visit(const FrequencyState& initial, double xi, const Model& model, Law law,
                       const IntegrationOptions& opts, const StateVisitor& visit);

Trajectory integrate(const FrequencyState& initial, double xi, const Model& model, Law law,
                     const IntegrationOptions& opts);

/// State at time t, reached in one composed propagation.
FrequencyState advance(const FrequencyState& initial, double xi, const Model& model, Law law, double t,
                       const IntegrationOptions& opts);

std::vector<double> output_times(const IntegrationOptions& opts);

/// sup_t |E_C - E_F| / max(E_F(0), eps) over a shared time grid.
double tau_zero_reduction_check(const Trajectory& cattaneo, const Model& cattaneo_model, const Trajectory& fourier,
                                const Model& fourier_model, double eps = 1e-300);

}  // namespace thermobeam
