#include "thermobeam/state.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "thermobeam/error.hpp"

namespace thermobeam {

FrequencyState FrequencyState::zero(Law law, std::size_t modes) {
  FrequencyState s;
  if (law == Law::Cattaneo) s.q = cplx{};
  s.w.assign(modes, cplx{});
  s.p.assign(modes, 0.0);
  return s;
}

cplx FrequencyState::memory_sum() const { return std::accumulate(w.begin(), w.end(), cplx{}); }

double FrequencyState::second_moment_sum() const { return std::accumulate(p.begin(), p.end(), 0.0); }

double FrequencyState::cauchy_schwarz_excess(double b0) const {
  return std::norm(memory_sum()) - b0 * second_moment_sum();
}

FrequencyState FrequencyState::conj() const {
  FrequencyState c = *this;
  c.v = std::conj(v);
  c.u = std::conj(u);
  c.z = std::conj(z);
  c.y = std::conj(y);
  c.theta = std::conj(theta);
  if (q) c.q = std::conj(*q);
  for (auto& wj : c.w) wj = std::conj(wj);
  return c;
}

namespace {
bool finite(cplx c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }
}  // namespace

bool FrequencyState::is_finite() const {
  if (!finite(v) || !finite(u) || !finite(z) || !finite(y) || !finite(theta)) return false;
  if (q && !finite(*q)) return false;
  for (auto wj : w)
    if (!finite(wj)) return false;
  for (auto pj : p)
    if (!std::isfinite(pj)) return false;
  return true;
}

bool FrequencyState::is_zero() const {
  const cplx zero{};
  if (v != zero || u != zero || z != zero || y != zero || theta != zero) return false;
  if (q && *q != zero) return false;
  for (auto wj : w)
    if (wj != zero) return false;
  for (auto pj : p)
    if (pj != 0.0) return false;
  return true;
}

FrequencyState& FrequencyState::operator+=(const FrequencyState& o) {
  if (o.has_q() != has_q() || o.w.size() != w.size() || o.p.size() != p.size()) {
    throw ShapeError("cannot add states of different layout");
  }
  v += o.v;
  u += o.u;
  z += o.z;
  y += o.y;
  theta += o.theta;
  if (q) *q += *o.q;
  for (std::size_t j = 0; j < w.size(); ++j) w[j] += o.w[j];
  for (std::size_t j = 0; j < p.size(); ++j) p[j] += o.p[j];
  return *this;
}

FrequencyState& FrequencyState::operator*=(double s) {
  v *= s;
  u *= s;
  z *= s;
  y *= s;
  theta *= s;
  if (q) *q *= s;
  for (auto& wj : w) wj *= s;
  for (auto& pj : p) pj *= s;
  return *this;
}

FrequencyState operator+(FrequencyState a, const FrequencyState& b) { return a += b; }

FrequencyState operator*(double s, FrequencyState a) { return a *= s; }

void check_shape(const FrequencyState& state, Law law, std::size_t modes) {
  if (law == Law::Cattaneo && !state.has_q()) {
    throw LawMismatch("Cattaneo law needs a heat-flux component q in the state");
  }
  if (law == Law::Fourier && state.has_q()) {
    throw ShapeError(
        "Fourier-law state must not carry q: the heat flux is slaved to theta, so any q listed in a "
        "Fourier solution vector is a notational slip and is not integrated");
  }
  if (state.w.size() != modes || state.p.size() != modes) {
    throw ShapeError("state has " + std::to_string(state.w.size()) + "/" + std::to_string(state.p.size()) +
                     " memory moments, kernel has " + std::to_string(modes) + " modes");
  }
}

void enforce_invariants(FrequencyState& state, double b0, const InvariantTolerance& tol) {
  for (std::size_t j = 0; j < state.p.size(); ++j) {
    double& pj = state.p[j];
    if (pj < 0.0) {
      if (pj < -tol.clip) {
        throw InvariantViolation("second moment p_" + std::to_string(j) + " = " + std::to_string(pj) +
                                 " is negative");
      }
      pj = 0.0;
    }
  }
  const double excess = state.cauchy_schwarz_excess(b0);
  if (excess > tol.cauchy_schwarz) {
    throw InvariantViolation("memory Cauchy-Schwarz inequality violated by " + std::to_string(excess));
  }
}

Eigen::VectorXcd linear_part(const FrequencyState& s) {
  const StateLayout layout{s.has_q(), s.modes()};
  Eigen::VectorXcd x(layout.size());
  x[StateLayout::v] = s.v;
  x[StateLayout::u] = s.u;
  x[StateLayout::z] = s.z;
  x[StateLayout::y] = s.y;
  x[StateLayout::theta] = s.theta;
  if (s.q) x[layout.q()] = *s.q;
  for (std::size_t j = 0; j < s.modes(); ++j) x[layout.w(j)] = s.w[j];
  return x;
}

FrequencyState from_linear(const Eigen::VectorXcd& x, const StateLayout& layout, std::vector<double> p) {
  if (x.size() != layout.size() || p.size() != layout.modes) throw ShapeError("linear vector size mismatch");
  FrequencyState s;
  s.v = x[StateLayout::v];
  s.u = x[StateLayout::u];
  s.z = x[StateLayout::z];
  s.y = x[StateLayout::y];
  s.theta = x[StateLayout::theta];
  if (layout.has_q) s.q = x[layout.q()];
  s.w.resize(layout.modes);
  for (std::size_t j = 0; j < layout.modes; ++j) s.w[j] = x[layout.w(j)];
  s.p = std::move(p);
  return s;
}

}  // namespace thermobeam
