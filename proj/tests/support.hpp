#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "thermobeam/model.hpp"
#include "thermobeam/state.hpp"

namespace testing {

inline thermobeam::MemoryKernel half_kernel() { return thermobeam::MemoryKernel{{{0.5, 1.0}}}; }

/// Every coefficient 1, kernel 0.5 e^{-s}.
inline thermobeam::Model unit_model(double tau = 1.0) {
  thermobeam::PhysicalParams p;
  p.tau = tau;
  return thermobeam::Model(p, half_kernel());
}

inline thermobeam::Model preset_model(const char* name) {
  const auto& p = thermobeam::preset(name);
  return thermobeam::Model(p.params, p.kernel);
}

/// Composite Simpson on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

inline thermobeam::cplx random_cplx(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng), n(rng)};
}

/// Random point fields and zero history.
inline thermobeam::FrequencyState random_point_state(std::mt19937_64& rng, thermobeam::Law law, std::size_t modes) {
  auto s = thermobeam::FrequencyState::zero(law, modes);
  s.v = random_cplx(rng);
  s.u = random_cplx(rng);
  s.z = random_cplx(rng);
  s.y = random_cplx(rng);
  s.theta = random_cplx(rng);
  if (s.q) *s.q = random_cplx(rng);
  return s;
}

inline double max_abs_diff(const thermobeam::FrequencyState& a, const thermobeam::FrequencyState& b) {
  double d = std::abs(a.v - b.v);
  d = std::max({d, std::abs(a.u - b.u), std::abs(a.z - b.z), std::abs(a.y - b.y), std::abs(a.theta - b.theta)});
  if (a.q && b.q) d = std::max(d, std::abs(*a.q - *b.q));
  for (std::size_t j = 0; j < a.w.size(); ++j) {
    d = std::max(d, std::abs(a.w[j] - b.w[j]));
    d = std::max(d, std::abs(a.p[j] - b.p[j]));
  }
  return d;
}

}  // namespace testing
