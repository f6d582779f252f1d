#pragma once

#include <vector>

#include "thermobeam/dynamics.hpp"
#include "thermobeam/model.hpp"

namespace thermobeam {

struct PointwiseFit {
  double xi = 0.0;
  double rho = 0.0;
  double lambda_fit = 0.0;
  double c_fit = 0.0;
  bool pass = false;
};

struct PointwiseOptions {
  double fit_from = 1.0;
  double c_max = 100.0;
};

/// Least-squares fit of log(E/E0) against -rho t on t >= fit_from, then
/// C = max_t E(t) / (E0 exp(-lambda rho t)). Throws DomainError when E(0) = 0.
PointwiseFit verify_pointwise_decay(const Trajectory& traj, const Model& model, Regime regime,
                                    const PointwiseOptions& opts = {});

/// Envelope constant max_t E(t) / (E0 exp(-lambda rho t)) for a given lambda.
double envelope_constant(const Trajectory& traj, const Model& model, double rho_value, double lambda);

struct UniformDecay {
  double lambda = 0.0;  // min over xi
  double c = 0.0;       // envelope constant with that lambda, max over xi
  bool pass = false;
};

/// One (C, lambda) for a whole family of trajectories.
UniformDecay uniform_decay(const std::vector<PointwiseFit>& fits, const std::vector<Trajectory>& trajectories,
                           const Model& model, const PointwiseOptions& opts = {});

}  // namespace thermobeam
