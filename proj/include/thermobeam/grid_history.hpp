#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thermobeam/model.hpp"
#include "thermobeam/state.hpp"

namespace thermobeam {

/// Uniform grid s_i = i * ds on [0, s_max] with `nodes` points.
struct SGrid {
  double s_max = 40.0;
  std::size_t nodes = 2000;

  double ds() const { return s_max / static_cast<double>(nodes - 1); }
  double node(std::size_t i) const { return static_cast<double>(i) * ds(); }
  void validate() const;

  /// s_max = span / min mu_j.
  static SGrid for_kernel(const MemoryKernel& kernel, std::size_t nodes = 2000, double span = 40.0);
};

/// Point fields plus the history variable eta(s) sampled on an SGrid; eta(0) = 0.
struct GridHistoryState {
  cplx v{}, u{}, z{}, y{}, theta{};
  std::optional<cplx> q;
  Eigen::VectorXcd eta;
};

/// Starts from the point fields of `point`; its memory moments must be zero.
GridHistoryState make_grid_state(const FrequencyState& point, const SGrid& grid);

struct HistoryIntegrals {
  cplx first{};        // Simpson quadrature of g(s) eta(s)
  double second = 0.0;  // Simpson quadrature of g(s) |eta(s)|^2
};

HistoryIntegrals history_integrals(const Eigen::VectorXcd& eta, const SGrid& grid, const MemoryKernel& kernel);

/// Method-of-lines derivative: first-order upwind transport eta_t = -eta_s + y with
/// inflow eta(0) = 0, point fields driven by the quadrature of the memory integral.
GridHistoryState rhs_grid_history(const GridHistoryState& state, double xi, const Model& model, Law law,
                                  const SGrid& grid);

double grid_energy(const GridHistoryState& state, double xi, const Model& model, Law law, const SGrid& grid);

enum class GridScheme {
  /// RK4 on the upwind semi-discretisation; time step <= ds.
  MethodOfLines,
  /// Exact transport along characteristics with unit Courant number, each macro
  /// step ds split into RK4 substeps for the point fields.
  Characteristic,
};

struct GridRunOptions {
  double t_end = 10.0;
  GridScheme scheme = GridScheme::Characteristic;
  /// Method of lines: largest RK4 step, must not exceed ds.
  double dt_max = 0.0;
  /// Minimum RK4 substeps per macro step ds.
  std::size_t substeps = 4;
  double c_stab = 0.05;
};

struct GridRun {
  std::vector<double> times;  // multiples of ds
  std::vector<double> energy;
  double max_inflow = 0.0;  // sup |eta(t, 0)|
};

/// Throws CflViolation when the method-of-lines step would exceed ds.
GridRun integrate_grid_history(const FrequencyState& initial, double xi, const Model& model, Law law,
                               const SGrid& grid, const GridRunOptions& opts);

}  // namespace thermobeam
