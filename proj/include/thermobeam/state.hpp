#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thermobeam/model.hpp"

namespace thermobeam {

using cplx = std::complex<double>;

/// Per-wavenumber state: point fields, heat flux (Cattaneo only) and the
/// first/second memory moments of the history variable, one entry per kernel mode.
struct FrequencyState {
  cplx v{}, u{}, z{}, y{}, theta{};
  std::optional<cplx> q;
  std::vector<cplx> w;
  std::vector<double> p;

  static FrequencyState zero(Law law, std::size_t modes);

  bool has_q() const { return q.has_value(); }
  std::size_t modes() const { return w.size(); }
  cplx memory_sum() const;
  double second_moment_sum() const;
  /// |sum w|^2 - b0 * sum p; non-positive for admissible states.
  double cauchy_schwarz_excess(double b0) const;

  FrequencyState conj() const;
  bool is_finite() const;
  bool is_zero() const;

  FrequencyState& operator+=(const FrequencyState& other);
  FrequencyState& operator*=(double s);
};

FrequencyState operator+(FrequencyState a, const FrequencyState& b);
FrequencyState operator*(double s, FrequencyState a);

/// Throws LawMismatch or ShapeError when the state layout does not fit (law, modes).
void check_shape(const FrequencyState& state, Law law, std::size_t modes);

/// Absolute slack allowed on p_j >= 0 and on the memory Cauchy-Schwarz inequality.
struct InvariantTolerance {
  double clip = 1e-12;
  double cauchy_schwarz = 1e-10;
};

/// Clips p_j in [-clip, 0) to zero; throws InvariantViolation on anything worse.
void enforce_invariants(FrequencyState& state, double b0, const InvariantTolerance& tol = {});

/// Index layout of the linear part (v, u, z, y, theta, [q], w_1..w_M).
struct StateLayout {
  bool has_q = false;
  std::size_t modes = 0;

  static constexpr int v = 0, u = 1, z = 2, y = 3, theta = 4;
  int q() const { return 5; }
  int w(std::size_t j) const { return (has_q ? 6 : 5) + static_cast<int>(j); }
  int size() const { return (has_q ? 6 : 5) + static_cast<int>(modes); }

  static StateLayout of(Law law, std::size_t modes) { return {law == Law::Cattaneo, modes}; }
};

Eigen::VectorXcd linear_part(const FrequencyState& state);
FrequencyState from_linear(const Eigen::VectorXcd& x, const StateLayout& layout, std::vector<double> p);

}  // namespace thermobeam
