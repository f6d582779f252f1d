#include "thermobeam/pointwise.hpp"

#include <algorithm>
#include <cmath>

#include "thermobeam/energy.hpp"
#include "thermobeam/error.hpp"

namespace thermobeam {

namespace {

std::vector<double> energies(const Trajectory& traj, const Model& model) {
  std::vector<double> e(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) e[k] = energy(traj.states[k], traj.xi, model, traj.law).total;
  return e;
}

}  // namespace

double envelope_constant(const Trajectory& traj, const Model& model, double rho_value, double lambda) {
  const std::vector<double> e = energies(traj, model);
  if (e.empty() || !(e.front() > 0.0)) throw DomainError("envelope needs E(0) > 0");
  double c = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double log_ratio = std::log(std::max(e[k], 1e-300) / e.front()) + lambda * rho_value * traj.times[k];
    c = std::max(c, std::exp(log_ratio));
  }
  return c;
}

PointwiseFit verify_pointwise_decay(const Trajectory& traj, const Model& model, Regime regime,
                                    const PointwiseOptions& opts) {
  const std::vector<double> e = energies(traj, model);
  if (e.empty() || !(e.front() > 0.0)) throw DomainError("pointwise decay needs E(0) > 0");
  PointwiseFit fit;
  fit.xi = traj.xi;
  fit.rho = rho(traj.xi, regime);

  // Regress y = log(E/E0) on x = -rho t; slope is lambda.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (traj.times[k] < opts.fit_from || !(e[k] > 1e-300)) continue;
    const double x = -fit.rho * traj.times[k];
    const double y = std::log(e[k] / e.front());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  fit.lambda_fit = (n >= 2 && denom > 0.0) ? (static_cast<double>(n) * sxy - sx * sy) / denom : 0.0;
  fit.c_fit = envelope_constant(traj, model, fit.rho, fit.lambda_fit);
  fit.pass = fit.lambda_fit > 0.0 && fit.c_fit <= opts.c_max;
  return fit;
}

UniformDecay uniform_decay(const std::vector<PointwiseFit>& fits, const std::vector<Trajectory>& trajectories,
                           const Model& model, const PointwiseOptions& opts) {
  UniformDecay out;
  if (fits.empty() || fits.size() != trajectories.size()) return out;
  out.lambda = fits.front().lambda_fit;
  for (const auto& f : fits) out.lambda = std::min(out.lambda, f.lambda_fit);
  for (std::size_t i = 0; i < fits.size(); ++i) {
    out.c = std::max(out.c, envelope_constant(trajectories[i], model, fits[i].rho, out.lambda));
  }
  out.pass = out.lambda > 0.0 && out.c <= opts.c_max;
  return out;
}

}  // namespace thermobeam
