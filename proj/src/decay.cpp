#include "thermobeam/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thermobeam/energy.hpp"
#include "thermobeam/error.hpp"
#include "thermobeam/parallel.hpp"

namespace thermobeam {

XiGrid XiGrid::simpson(double xi_min, double xi_max, std::size_t panels) {
  if (panels == 0 || !(xi_max > xi_min) || xi_min < 0.0) {
    throw InvalidParameters("xi grid needs 0 <= xi_min < xi_max and panels >= 1");
  }
  const std::size_t n = 2 * panels + 1;
  const double h = (xi_max - xi_min) / static_cast<double>(n - 1);
  XiGrid g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.nodes[i] = i + 1 == n ? xi_max : xi_min + static_cast<double>(i) * h;
    const double simpson = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    g.weights[i] = 2.0 * simpson * h / 3.0;
  }
  return g;
}

double XiGrid::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

double state_norm_sq(const FrequencyState& s, double xi) {
  double n = std::norm(s.v) + std::norm(s.u) + std::norm(s.z) + std::norm(s.y) + std::norm(s.theta);
  if (s.q) n += std::norm(*s.q);
  return n + xi * xi * s.second_moment_sum();
}

std::vector<double> plancherel_norm_sq(const XiGrid& grid, const std::vector<Trajectory>& trajectories, int k) {
  if (trajectories.size() != grid.size()) throw GridMismatch("one trajectory per xi node is required");
  if (trajectories.empty()) return {};
  const std::size_t n_t = trajectories.front().size();
  std::vector<double> out(n_t, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Trajectory& tr = trajectories[i];
    if (tr.size() != n_t) throw GridMismatch("trajectories have different output grids");
    if (tr.xi != grid.nodes[i]) throw GridMismatch("trajectory wavenumber does not match its grid node");
    const double w = grid.weights[i] * std::pow(std::abs(tr.xi), 2 * k);
    for (std::size_t t = 0; t < n_t; ++t) out[t] += w * state_norm_sq(tr.states[t], tr.xi);
  }
  return out;
}

SobolevNorms plancherel_norms(const XiGrid& grid, const std::vector<std::vector<double>>& series,
                              const std::vector<double>& times, int k_max) {
  if (series.size() != grid.size()) throw GridMismatch("one series per xi node is required");
  SobolevNorms out;
  out.times = times;
  out.norms.assign(static_cast<std::size_t>(k_max) + 1, std::vector<double>(times.size(), 0.0));
  for (int k = 0; k <= k_max; ++k) {
    auto& sum = out.norms[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (series[i].empty()) continue;
      if (series[i].size() != times.size()) throw GridMismatch("series length differs from the time grid");
      const double w = grid.weights[i] * std::pow(grid.nodes[i], 2 * k);
      for (std::size_t t = 0; t < times.size(); ++t) sum[t] += w * series[i][t];
    }
    for (double& v : sum) v = std::sqrt(v);
  }
  return out;
}

SobolevNorms sobolev_norms(const Model& model, Law law, const InitialDataSpec& spec, const XiGrid& grid,
                           const IntegrationOptions& opts, int k_max, std::size_t workers) {
  spec.validate(model, law);
  const std::vector<double> times = output_times(opts);
  std::vector<std::vector<double>> series(grid.size());
  std::vector<double> excess(grid.size(), -std::numeric_limits<double>::infinity());
  parallel_for(grid.size(), workers, [&](std::size_t i) {
    const double xi = grid.nodes[i];
    const FrequencyState init = make_state(spec, xi, model, law);
    if (init.is_zero()) return;
    std::vector<double> s(times.size());
    excess[i] = integrate_visit(init, xi, model, law, opts,
                                [&](std::size_t k, double, const FrequencyState& st) { s[k] = state_norm_sq(st, xi); });
    series[i] = std::move(s);
  });
  SobolevNorms out = plancherel_norms(grid, series, times, k_max);
  out.max_cs_excess = *std::max_element(excess.begin(), excess.end());
  if (!std::isfinite(out.max_cs_excess)) out.max_cs_excess = 0.0;
  return out;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& series, double t_lo,
                        double t_hi) {
  if (times.size() != series.size()) throw GridMismatch("time and value series differ in length");
  DecayFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(series[i] > 0.0)) throw DomainError("decay fit needs positive values on the window");
    xs.push_back(std::log1p(times[i]));
    ys.push_back(std::log(series[i]));
  }
  if (xs.size() < 2) throw DomainError("decay fit needs at least two samples in the window");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw DomainError("decay fit window has a single distinct time");
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.log_constant = (sy - fit.exponent * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.log_constant - fit.exponent * xs[i];
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.samples = xs.size();
  return fit;
}

double theorem_bound_shape(double t, int k, int l, double u0_l1, double dkl_u0_l2, Regime regime) {
  const double s = regime == Regime::ChiZero ? 2.0 : 4.0;
  const double first = u0_l1 == 0.0 ? 0.0 : std::pow(1.0 + t, -0.125 - 0.25 * k) * u0_l1;
  return first + std::pow(1.0 + t, -static_cast<double>(l) / s) * dkl_u0_l2;
}

TheoremBoundCheck verify_theorem_bound(const SobolevNorms& norms, int k, int l, double u0_l1, double dkl_u0_l2,
                                       Regime regime, double t_cal, double t_hi, double factor) {
  if (k < 0 || static_cast<std::size_t>(k) >= norms.norms.size()) {
    throw DomainError("norm index k=" + std::to_string(k) + " was not computed");
  }
  const auto& series = norms.norms[static_cast<std::size_t>(k)];
  TheoremBoundCheck out;
  bool calibrated = false;
  for (std::size_t i = 0; i < norms.times.size(); ++i) {
    const double t = norms.times[i];
    if (t < t_cal - 1e-9 || t > t_hi + 1e-9) continue;
    const double shape = theorem_bound_shape(t, k, l, u0_l1, dkl_u0_l2, regime);
    const double ratio =
        series[i] == 0.0 ? 0.0 : (shape > 0.0 ? series[i] / shape : std::numeric_limits<double>::infinity());
    if (!calibrated) {
      out.c_cal = ratio;
      calibrated = true;
    }
    if (ratio > out.c_fit) {
      out.c_fit = ratio;
      out.worst_t = t;
    }
  }
  if (!calibrated) throw DomainError("no output times in the theorem-bound window");
  out.growth = out.c_cal > 0.0 ? out.c_fit / out.c_cal : (out.c_fit == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  out.pass = out.c_cal == 0.0 ? out.c_fit == 0.0 : std::isfinite(out.c_fit) && out.c_fit <= factor * out.c_cal;
  return out;
}

namespace {

XiGrid band_grid(double center, const BandOptions& opts) {
  return XiGrid::simpson(center - opts.half_width, center + opts.half_width, opts.panels);
}

FrequencyState band_state(double xi, const Model& model, Law law, double amplitude) {
  FrequencyState s = FrequencyState::zero(law, model.modes());
  s.y = amplitude;
  if (xi < 0.0) s = s.conj();
  return s;
}

}  // namespace

double band_energy(const Model& model, Law law, double center, double t, const BandOptions& opts) {
  const XiGrid grid = band_grid(center, opts);
  double total = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double xi = grid.nodes[i];
    const FrequencyState s = advance(band_state(xi, model, law, opts.amplitude), xi, model, law, t, opts.integration);
    total += grid.weights[i] * energy(s, xi, model, law).total;
  }
  return total;
}

HalfLife band_half_life(const Model& model, Law law, double center, const BandOptions& opts) {
  HalfLife out;
  out.center = center;
  out.e0 = band_energy(model, law, center, 0.0, opts);
  if (!(out.e0 > 0.0)) throw DomainError("band data has zero energy");
  const double target = 0.5 * out.e0;
  double lo = 0.0, hi = opts.first_probe;
  while (band_energy(model, law, center, hi, opts) > target) {
    lo = hi;
    hi *= 2.0;
    if (hi > opts.t_budget) {
      out.half_life = opts.t_budget;
      out.censored = true;
      return out;
    }
  }
  while (hi - lo > opts.relative_tolerance * hi) {
    const double mid = 0.5 * (lo + hi);
    if (band_energy(model, law, center, mid, opts) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.half_life = hi;
  return out;
}

RegularityLoss regularity_loss_experiment(const Model& model, Law law, const std::vector<double>& centers,
                                          const BandOptions& opts, std::size_t workers) {
  for (double c : centers) {
    if (c - opts.half_width < 1.0) {
      throw DomainError("band around " + std::to_string(c) + " reaches below xi = 1");
    }
  }
  std::vector<double> sorted = centers;
  std::sort(sorted.begin(), sorted.end());
  RegularityLoss out;
  out.rows.resize(sorted.size());
  parallel_for(sorted.size(), workers,
               [&](std::size_t i) { out.rows[i] = band_half_life(model, law, sorted[i], opts); });

  std::vector<double> t, v;
  for (const auto& r : out.rows) {
    if (r.censored) continue;
    t.push_back(std::log(r.center));
    v.push_back(std::log(r.half_life));
  }
  if (t.size() >= 2) {
    double mt = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      mt += t[i];
      mv += v[i];
    }
    mt /= static_cast<double>(t.size());
    mv /= static_cast<double>(t.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      num += (t[i] - mt) * (v[i] - mv);
      den += (t[i] - mt) * (t[i] - mt);
    }
    out.slope = num / den;
    out.slope_valid = true;
  }
  out.monotone = !out.rows.empty();
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (!(out.rows[i].half_life > out.rows[i - 1].half_life)) out.monotone = false;
  }
  return out;
}

}  // namespace thermobeam
