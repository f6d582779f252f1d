#include "thermobeam/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>
#include <mutex>

#include "thermobeam/decay.hpp"
#include "thermobeam/energy.hpp"
#include "thermobeam/error.hpp"
#include "thermobeam/lyapunov.hpp"
#include "thermobeam/parallel.hpp"
#include "thermobeam/pointwise.hpp"

#ifndef THERMOBEAM_VERSION
#define THERMOBEAM_VERSION "unknown"
#endif

namespace thermobeam {

using nlohmann::json;

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass:
      return "PASS";
    case CheckStatus::Fail:
      return "FAIL";
    case CheckStatus::Censored:
      return "CENSORED";
  }
  return "FAIL";
}

json Check::to_json() const {
  json j = {{"name", name}, {"invariant", invariant}, {"status", to_string(status)}, {"details", details}};
  j["offending"] = offending;
  return j;
}

json ExperimentReport::summary() const {
  json j = header;
  j["experiment"] = to_string(kind);
  json checks_json = json::array();
  for (const auto& c : checks) checks_json.push_back(c.to_json());
  j["checks"] = checks_json;
  j["results"] = results;
  j["status"] = exit_code() == 0 ? "PASS" : "FAIL";
  return j;
}

int ExperimentReport::exit_code() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return 1;
  return 0;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// JSON has no infinity; non-finite values are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

CheckStatus pass_if(bool ok) { return ok ? CheckStatus::Pass : CheckStatus::Fail; }

json state_json(const FrequencyState& s) {
  auto c = [](cplx z) { return json::array({num(z.real()), num(z.imag())}); };
  json j = {{"v", c(s.v)}, {"u", c(s.u)}, {"z", c(s.z)}, {"y", c(s.y)}, {"theta", c(s.theta)}};
  if (s.q) j["q"] = c(*s.q);
  json w = json::array(), p = json::array();
  for (auto x : s.w) w.push_back(c(x));
  for (double x : s.p) p.push_back(num(x));
  j["w"] = w;
  j["p"] = p;
  return j;
}

// Worst memory Cauchy-Schwarz excess seen across every integrated state.
class CauchySchwarzMonitor {
 public:
  explicit CauchySchwarzMonitor(double b0) : b0_(b0) {}

  void observe(double xi, double t, const FrequencyState& s) {
    const double e = s.cauchy_schwarz_excess(b0_);
    if (std::isnan(e)) return;
    std::lock_guard<std::mutex> lock(mutex_);
    ++states_;
    if (e > worst_ || (e == worst_ && (xi < xi_ || (xi == xi_ && t < t_)))) {
      worst_ = e;
      xi_ = xi;
      t_ = t;
      state_ = s;
    }
  }

  void merge_max(double excess) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (excess > worst_) {
      worst_ = excess;
      xi_ = std::numeric_limits<double>::quiet_NaN();
      state_.reset();
    }
  }

  Check check(double threshold, const std::string& scope) const {
    Check c{"memory-cauchy-schwarz", "|sum w_j|^2 <= b0 sum p_j + tol at every output step", CheckStatus::Pass};
    c.details = {{"scope", scope}, {"threshold", threshold}, {"b0", b0_}};
    if (states_ > 0 || std::isfinite(worst_)) c.details["max_excess"] = num(worst_);
    c.details["states_checked"] = states_;
    if (worst_ > threshold) {
      c.status = CheckStatus::Fail;
      c.offending = {{"excess", num(worst_)}};
      if (!std::isnan(xi_)) {
        c.offending["xi"] = xi_;
        c.offending["t"] = t_;
      }
      if (state_) c.offending["state"] = state_json(*state_);
    }
    return c;
  }

 private:
  double b0_;
  std::mutex mutex_;
  double worst_ = -kInf;
  double xi_ = kInf;
  double t_ = kInf;
  std::optional<FrequencyState> state_;
  std::size_t states_ = 0;
};

// Invariant enforcement that reports rather than throws on the Cauchy-Schwarz bound.
IntegrationOptions monitored(IntegrationOptions opts) {
  opts.tolerance.cauchy_schwarz = kInf;
  return opts;
}

Trajectory tracked_trajectory(const FrequencyState& init, double xi, const Model& model, Law law,
                              const IntegrationOptions& opts, CauchySchwarzMonitor& cs) {
  Trajectory traj;
  traj.xi = xi;
  traj.law = law;
  traj.max_cs_excess = integrate_visit(init, xi, model, law, monitored(opts),
                                       [&](std::size_t, double t, const FrequencyState& s) {
                                         cs.observe(xi, t, s);
                                         traj.times.push_back(t);
                                         traj.states.push_back(s);
                                       });
  return traj;
}

json header_for(const ExperimentConfig& config, const Model& model, Law law, Regime regime) {
  json j;
  j["preset"] = config.preset.empty() ? json(nullptr) : json(config.preset);
  j["law"] = to_string(law);
  j["regime"] = to_string(regime);
  j["stability_number"] = stability_number(model.params(), law);
  j["b0"] = model.b0();
  j["seed"] = config.seed;
  return j;
}

std::string law_suffix(Law law) { return "_law-" + to_string(law); }

// ---------------------------------------------------------------- dissipation

void dissipation_audit(const ExperimentConfig& config, ResultWriter& writer, std::size_t workers,
                       ExperimentReport& report) {
  const Model model = config.model();
  const Law law = config.law;
  const double b0 = model.b0();
  CauchySchwarzMonitor cs(b0);

  struct Row {
    std::vector<double> t, fd, fd2, exact, chain;
  };
  std::vector<Row> rows(config.xi_values.size());
  parallel_for(config.xi_values.size(), workers, [&](std::size_t i) {
    const double xi = config.xi_values[i];
    const FrequencyState init = make_state(config.initial, xi, model, law);
    std::vector<double> times, e, exact, chain;
    integrate_visit(init, xi, model, law, monitored(config.time), [&](std::size_t, double t, const FrequencyState& s) {
      cs.observe(xi, t, s);
      times.push_back(t);
      e.push_back(energy(s, xi, model, law).total);
      exact.push_back(dissipation_rate(s, xi, model, law));
      chain.push_back(energy_rate(s, xi, model, law));
    });
    Row& r = rows[i];
    // Fourth-order centered stencil; the three-point one is kept for reference.
    for (std::size_t k = 2; k + 2 < times.size(); ++k) {
      const double h = times[k + 1] - times[k];
      r.t.push_back(times[k]);
      r.fd.push_back((e[k - 2] - 8.0 * e[k - 1] + 8.0 * e[k + 1] - e[k + 2]) / (12.0 * h));
      r.fd2.push_back((e[k + 1] - e[k - 1]) / (times[k + 1] - times[k - 1]));
      r.exact.push_back(exact[k]);
      r.chain.push_back(chain[k]);
    }
  });

  CsvTable table({"xi", "t", "fd_rate", "fd3_rate", "exact_rate", "chain_rule_rate", "residual"});
  json per_xi = json::array();
  const double threshold = config.thresholds.dissipation_relative;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double xi = config.xi_values[i];
    const Row& r = rows[i];
    double scale = 0.0, worst = 0.0, chain_worst = 0.0, fd2_worst = 0.0;
    std::size_t worst_k = 0;
    for (std::size_t k = 0; k < r.t.size(); ++k) {
      scale = std::max(scale, std::abs(r.exact[k]));
      const double res = std::abs(r.fd[k] - r.exact[k]);
      if (res > worst) {
        worst = res;
        worst_k = k;
      }
      chain_worst = std::max(chain_worst, std::abs(r.chain[k] - r.exact[k]));
      fd2_worst = std::max(fd2_worst, std::abs(r.fd2[k] - r.exact[k]));
      table.add_row({xi, r.t[k], r.fd[k], r.fd2[k], r.exact[k], r.chain[k], res});
    }
    const double rel = scale > 0.0 ? worst / scale : (worst == 0.0 ? 0.0 : kInf);
    const double chain_rel = scale > 0.0 ? chain_worst / scale : (chain_worst == 0.0 ? 0.0 : kInf);
    const double fd2_rel = scale > 0.0 ? fd2_worst / scale : (fd2_worst == 0.0 ? 0.0 : kInf);
    per_xi.push_back({{"xi", xi},
                      {"relative_error", num(rel)},
                      {"chain_rule_relative_error", num(chain_rel)},
                      {"three_point_relative_error", num(fd2_rel)},
                      {"max_abs_rate", scale},
                      {"samples", r.t.size()}});
    Check c{"dissipation-identity[xi=" + format_double(xi) + "]",
            "centered-difference dE/dt matches the closed-form dissipation", pass_if(rel <= threshold)};
    c.details = {{"relative_error", num(rel)}, {"threshold", threshold}, {"dt", config.time.output_stride}};
    if (c.status == CheckStatus::Fail && !r.t.empty()) {
      c.offending = {{"xi", xi}, {"t", r.t[worst_k]}, {"fd_rate", r.fd[worst_k]}, {"exact_rate", r.exact[worst_k]}};
    }
    report.checks.push_back(std::move(c));
  }
  report.results["dissipation"] = per_xi;
  writer.put("dissipation_residuals.csv", table.str());
  report.checks.push_back(cs.check(config.thresholds.cauchy_schwarz, "dissipation trajectories"));
}

// ---------------------------------------------------------------- pointwise

struct PointwiseOutcome {
  std::vector<PointwiseFit> fits;
  std::optional<UniformDecay> uniform;
  std::vector<Trajectory> trajectories;
};

PointwiseOutcome pointwise_family(const ExperimentConfig& config, const Model& model, Law law, Regime regime,
                                  std::size_t workers, CauchySchwarzMonitor& cs) {
  const auto& xs = config.xi_values;
  std::vector<std::optional<Trajectory>> trajs(xs.size());
  parallel_for(xs.size(), workers, [&](std::size_t i) {
    const double xi = xs[i];
    const FrequencyState init = make_state(config.initial, xi, model, law);
    if (energy(init, xi, model, law).total == 0.0) return;
    IntegrationOptions opts = config.time;
    const double r = rho(xi, regime);
    opts.t_end = std::min(config.pointwise.t_factor / r, config.pointwise.t_cap);
    opts.output_stride = opts.t_end / static_cast<double>(config.pointwise.outputs);
    trajs[i] = tracked_trajectory(init, xi, model, law, opts, cs);
  });
  PointwiseOutcome out;
  const PointwiseOptions popts{config.pointwise.fit_from, config.thresholds.pointwise_c_max};
  for (auto& t : trajs) {
    if (!t) continue;
    out.fits.push_back(verify_pointwise_decay(*t, model, regime, popts));
    out.trajectories.push_back(std::move(*t));
  }
  if (!out.fits.empty()) out.uniform = uniform_decay(out.fits, out.trajectories, model, popts);
  return out;
}

json fits_json(const std::vector<PointwiseFit>& fits) {
  json arr = json::array();
  for (const auto& f : fits) {
    arr.push_back(
        {{"xi", f.xi}, {"rho", f.rho}, {"lambda_fit", num(f.lambda_fit)}, {"C_fit", num(f.c_fit)}, {"pass", f.pass}});
  }
  return arr;
}

Check pointwise_check(const PointwiseOutcome& o, const ExperimentConfig& config, const std::string& suffix) {
  Check c{"pointwise-decay" + suffix, "E(xi,t) <= C exp(-lambda rho(xi) t) E(xi,0) with one (C, lambda)",
          CheckStatus::Pass};
  if (!o.uniform) {
    c.details = {{"trivial", true}};
    return c;
  }
  c.status = pass_if(o.uniform->pass);
  c.details = {{"lambda", num(o.uniform->lambda)}, {"C", num(o.uniform->c)}, {"c_max", config.thresholds.pointwise_c_max}};
  if (c.status == CheckStatus::Fail) {
    const auto worst = std::min_element(o.fits.begin(), o.fits.end(),
                                        [](const auto& a, const auto& b) { return a.lambda_fit < b.lambda_fit; });
    c.offending = {{"xi", worst->xi}, {"lambda_fit", num(worst->lambda_fit)}, {"C_fit", num(worst->c_fit)}};
  }
  return c;
}

void pointwise_decay(const ExperimentConfig& config, ResultWriter& writer, std::size_t workers, ExperimentReport& report) {
  const Model model = config.model();
  const Law law = config.law;
  const Regime regime = config.resolved_regime();
  CauchySchwarzMonitor cs(model.b0());
  const PointwiseOutcome o = pointwise_family(config, model, law, regime, workers, cs);
  json records = fits_json(o.fits);
  report.results["pointwise"] = records;
  if (o.uniform) {
    report.results["uniform"] = {{"lambda", num(o.uniform->lambda)}, {"C", num(o.uniform->c)}, {"pass", o.uniform->pass}};
  }
  writer.put_json("pointwise.json", {{"law", to_string(law)}, {"regime", to_string(regime)}, {"records", records}});
  if (config.pointwise.write_trajectories) {
    for (const auto& t : o.trajectories) writer.put(trajectory_file_name(law, t.xi), trajectory_csv(t));
  }
  report.checks.push_back(pointwise_check(o, config, ""));
  report.checks.push_back(cs.check(config.thresholds.cauchy_schwarz, "pointwise trajectories"));
}

// ---------------------------------------------------------------- sobolev

json run_sobolev(const ExperimentConfig& config, const Model& model, Law law, Regime regime, std::size_t workers,
                 const std::string& suffix, ResultWriter& writer, std::vector<Check>& checks, CauchySchwarzMonitor& cs) {
  const auto& st = config.sobolev;
  const XiGrid grid = XiGrid::simpson(0.0, config.xi_max, config.panels);
  const SobolevNorms norms =
      sobolev_norms(model, law, config.initial, grid, monitored(config.time), st.k_max, workers);
  cs.merge_max(norms.max_cs_excess);

  std::vector<std::string> header{"t"};
  for (int k = 0; k <= st.k_max; ++k) header.push_back("norm_k" + std::to_string(k));
  CsvTable table(header);
  for (std::size_t i = 0; i < norms.times.size(); ++i) {
    std::vector<double> row{norms.times[i]};
    for (int k = 0; k <= st.k_max; ++k) row.push_back(norms.norms[static_cast<std::size_t>(k)][i]);
    table.add_row(row);
  }
  writer.put("norms" + suffix + ".csv", table.str());

  const InitialNorms init = initial_norms(config.initial, model, law, st.k_max + st.l);
  json out = {{"law", to_string(law)},
              {"regime", to_string(regime)},
              {"initial_l1", num(init.l1)},
              {"xi_max", config.xi_max},
              {"panels", config.panels}};
  json l2 = json::array();
  for (double v : init.l2) l2.push_back(num(v));
  out["initial_l2"] = l2;
  out["plancherel_l2_t0"] = norms.norms[0].empty() ? 0.0 : norms.norms[0][0];

  const bool trivial = config.initial.is_zero();
  json bounds = json::array();
  for (int k = 0; k <= st.k_max; ++k) {
    Check c{"theorem-bound[k=" + std::to_string(k) + "]" + suffix,
            "||d^k U(t)|| / bound(t) never exceeds growth factor times its value at t_cal", CheckStatus::Pass};
    if (trivial) {
      c.details = {{"trivial", true}};
      checks.push_back(c);
      continue;
    }
    const TheoremBoundCheck b = verify_theorem_bound(norms, k, st.l, init.l1, init.l2[static_cast<std::size_t>(k + st.l)],
                                                     regime, st.t_cal, st.t_hi, config.thresholds.bound_growth);
    c.status = pass_if(b.pass);
    c.details = {{"C_cal", num(b.c_cal)}, {"C_fit", num(b.c_fit)}, {"growth", num(b.growth)},
                 {"factor", config.thresholds.bound_growth}, {"l", st.l}};
    bounds.push_back({{"k", k}, {"C_cal", num(b.c_cal)}, {"C_fit", num(b.c_fit)}, {"growth", num(b.growth)},
                      {"worst_t", b.worst_t}, {"pass", b.pass}});
    if (!b.pass) {
      const auto it = std::lower_bound(norms.times.begin(), norms.times.end(), b.worst_t);
      const std::size_t idx = static_cast<std::size_t>(it - norms.times.begin());
      c.offending = {{"t", b.worst_t}, {"norm", idx < norms.times.size() ? norms.norms[static_cast<std::size_t>(k)][idx] : 0.0}};
    }
    checks.push_back(std::move(c));
  }
  out["bounds"] = bounds;

  Check e{"decay-exponent[k=0]" + suffix, "fitted log-log exponent of ||U(t)|| is at most the configured maximum",
          CheckStatus::Pass};
  if (trivial) {
    e.details = {{"trivial", true}};
  } else {
    const DecayFit fit = fit_decay_rate(norms.times, norms.norms[0], st.fit_lo, st.fit_hi);
    e.status = pass_if(fit.exponent <= config.thresholds.sobolev_exponent_max);
    e.details = {{"exponent", fit.exponent}, {"max", config.thresholds.sobolev_exponent_max}};
    out["fit"] = {{"exponent", fit.exponent}, {"log_constant", fit.log_constant}, {"residual", fit.residual},
                  {"t_lo", fit.t_lo}, {"t_hi", fit.t_hi}, {"samples", fit.samples}};
    if (e.status == CheckStatus::Fail) e.offending = {{"exponent", fit.exponent}, {"t_lo", fit.t_lo}, {"t_hi", fit.t_hi}};
  }
  checks.push_back(std::move(e));
  return out;
}

void sobolev_decay(const ExperimentConfig& config, ResultWriter& writer, std::size_t workers, ExperimentReport& report) {
  const Model model = config.model();
  CauchySchwarzMonitor cs(model.b0());
  report.results["sobolev"] =
      run_sobolev(config, model, config.law, config.resolved_regime(), workers, "", writer, report.checks, cs);
  report.checks.push_back(cs.check(config.thresholds.cauchy_schwarz, "all xi nodes"));
}

// ---------------------------------------------------------------- regularity loss

void regularity_loss(const ExperimentConfig& config, ResultWriter& writer, std::size_t workers,
                     ExperimentReport& report) {
  const Model model = config.model();
  const Regime regime = config.resolved_regime();
  BandOptions band = config.band;
  band.integration.tolerance.cauchy_schwarz = config.thresholds.cauchy_schwarz;
  const RegularityLoss r = regularity_loss_experiment(model, config.law, config.centers, band, workers);

  CsvTable table({"center", "half_life", "censored", "e0"});
  json rows = json::array();
  for (const auto& h : r.rows) {
    table.add_row({h.center, h.half_life, h.censored ? 1.0 : 0.0, h.e0});
    rows.push_back({{"center", h.center}, {"half_life", h.half_life}, {"censored", h.censored}, {"e0", h.e0}});
  }
  writer.put("halflife.csv", table.str());
  const double target = regime == Regime::ChiZero ? config.thresholds.slope_chi_zero : config.thresholds.slope_chi_nonzero;
  report.results["regularity_loss"] = {{"rows", rows},
                                       {"slope", r.slope_valid ? json(r.slope) : json(nullptr)},
                                       {"monotone", r.monotone},
                                       {"target_slope", target}};

  Check c{"half-life-slope", "slope of log half-life against log center matches the regime tail exponent",
          CheckStatus::Pass};
  c.details = {{"target", target}, {"tolerance", config.thresholds.slope_tolerance}, {"monotone", r.monotone}};
  const bool any_censored = std::any_of(r.rows.begin(), r.rows.end(), [](const auto& h) { return h.censored; });
  if (!r.slope_valid) {
    c.status = CheckStatus::Censored;
  } else {
    c.details["slope"] = r.slope;
    const bool ok = std::abs(r.slope - target) <= config.thresholds.slope_tolerance;
    c.status = ok ? (any_censored ? CheckStatus::Censored : CheckStatus::Pass) : CheckStatus::Fail;
    if (!ok) c.offending = {{"slope", r.slope}, {"rows", rows}};
  }
  report.checks.push_back(std::move(c));

  Check cs{"memory-cauchy-schwarz", "|sum w_j|^2 <= b0 sum p_j + tol at every output step", CheckStatus::Pass};
  cs.details = {{"scope", "band propagations"}, {"threshold", config.thresholds.cauchy_schwarz}, {"enforced", true}};
  report.checks.push_back(std::move(cs));
}

// ---------------------------------------------------------------- lyapunov

void lyapunov_audit(const ExperimentConfig& config, ResultWriter& writer, std::size_t, ExperimentReport& report) {
  const Model model = config.model();
  const Law law = config.law;
  const Regime regime = config.resolved_regime();
  const auto& ls = config.lyapunov;

  LyapunovCoefficients coeffs;
  Check cal{"lyapunov-calibration", "coefficients exist with a positive certified decay rate on the grid",
            CheckStatus::Pass};
  if (ls.coefficients) {
    coeffs = *ls.coefficients;
    double gamma = kInf, worst_xi = 0.0;
    for (double xi : ls.calibration_xi) {
      const double g = LyapunovForm(xi, model, coeffs).certified_gamma();
      if (g < gamma) {
        gamma = g;
        worst_xi = xi;
      }
    }
    cal.status = pass_if(gamma > 0.0);
    cal.details = {{"replayed", true}, {"gamma_certified", num(gamma)}};
    if (!(gamma > 0.0)) cal.offending = {{"xi", worst_xi}, {"gamma_certified", num(gamma)}};
    report.results["calibration"] = {{"replayed", true}, {"gamma_certified", num(gamma)}};
  } else {
    CalibrationOptions copts;
    copts.xi_grid = ls.calibration_xi;
    copts.samples_per_xi = ls.samples_per_xi;
    copts.seed = config.seed;
    try {
      const CalibrationResult res = calibrate_coefficients(model, law, regime, copts);
      coeffs = res.coefficients;
      cal.details = {{"replayed", false},
                     {"gamma_certified", num(res.gamma_certified)},
                     {"gamma_sampled", num(res.gamma_sampled)},
                     {"sweeps", res.sweeps}};
      report.results["calibration"] = cal.details;
    } catch (const CalibrationFailure& e) {
      cal.status = CheckStatus::Fail;
      cal.offending = {{"error", e.what()}};
      report.checks.push_back(std::move(cal));
      return;
    }
  }
  report.checks.push_back(cal);
  report.results["coefficients"] = coefficients_to_json(coeffs);
  writer.put_json("lyapunov_coefficients.json", {{"lyapunov", {{"coefficients", coefficients_to_json(coeffs)}}}});

  const std::size_t n_xi = std::max<std::size_t>(1, ls.equivalence_xi.size());
  const std::size_t per_xi = (ls.equivalence_samples + n_xi - 1) / n_xi;
  const EquivalenceResult eq = verify_equivalence(model, coeffs, ls.equivalence_xi, per_xi, config.seed);
  Check eqc{"lyapunov-equivalence", "(N - M2)(1+xi^2)^2 E <= L <= (N + M2)(1+xi^2)^2 E on random states",
            pass_if(eq.pass)};
  eqc.details = {{"M2", num(eq.m2)}, {"N", coeffs.N}, {"samples", eq.samples}};
  if (!eq.pass) eqc.offending = {{"M2", num(eq.m2)}, {"N", coeffs.N}};
  report.checks.push_back(std::move(eqc));
  report.results["equivalence"] = {{"M2", num(eq.m2)}, {"samples", eq.samples}, {"pass", eq.pass}};

  const RateCheck rate = certify_trajectories(model, coeffs, ls.calibration_xi, ls.trajectories, ls.t_end,
                                              ls.output_stride, config.seed);
  Check rc{"lyapunov-rate", "dL/dt <= -Gamma rho(xi) L with Gamma > 0 along random trajectories", pass_if(rate.pass)};
  rc.details = {{"gamma", num(rate.gamma)}, {"samples", rate.samples}, {"trajectories", ls.trajectories}};
  if (!rate.pass) rc.offending = {{"xi", rate.worst_xi}, {"t", rate.worst_t}, {"gamma", num(rate.gamma)}};
  report.checks.push_back(std::move(rc));
  report.results["trajectory_rate"] = {{"gamma", num(rate.gamma)}, {"worst_xi", rate.worst_xi},
                                       {"worst_t", rate.worst_t}, {"samples", rate.samples}};

  Check cs{"memory-cauchy-schwarz", "|sum w_j|^2 <= b0 sum p_j + tol at every output step", CheckStatus::Pass};
  cs.details = {{"scope", "certification trajectories"}, {"threshold", config.thresholds.cauchy_schwarz}, {"enforced", true}};
  report.checks.push_back(std::move(cs));
}

// ---------------------------------------------------------------- chi sweep

void chi_sweep(const ExperimentConfig& config, ResultWriter& writer, std::size_t workers, ExperimentReport& report) {
  const Model base = config.model();
  const Law law = config.law;
  const auto& rs = config.chi_sweep.rho2;
  BandOptions band = config.band;
  band.integration.tolerance.cauchy_schwarz = config.thresholds.cauchy_schwarz;
  std::vector<HalfLife> hl(rs.size());
  parallel_for(rs.size(), workers,
               [&](std::size_t i) { hl[i] = band_half_life(base.with_rho2(rs[i]), law, config.chi_sweep.center, band); });

  std::string csv = "rho2,stability_number,regime,half_life,censored\n";
  json rows = json::array();
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const PhysicalParams p = base.with_rho2(rs[i]).params();
    const double chi = stability_number(p, law);
    const Regime regime = detect_regime(p, law);
    csv += format_double(rs[i]) + "," + format_double(chi) + "," + to_string(regime) + "," +
           format_double(hl[i].half_life) + "," + (hl[i].censored ? "1" : "0") + "\n";
    rows.push_back({{"rho2", rs[i]},
                    {"stability_number", chi},
                    {"regime", to_string(regime)},
                    {"half_life", hl[i].half_life},
                    {"censored", hl[i].censored}});
    Check c{"half-life[rho2=" + format_double(rs[i]) + "]", "band half-life measured within the time budget",
            hl[i].censored ? CheckStatus::Censored : CheckStatus::Pass};
    c.details = {{"half_life", hl[i].half_life}, {"t_budget", band.t_budget}};
    report.checks.push_back(std::move(c));
  }
  writer.put("chi_sweep.csv", csv);
  report.results["chi_sweep"] = {{"center", config.chi_sweep.center}, {"rows", rows}};

  Check cs{"memory-cauchy-schwarz", "|sum w_j|^2 <= b0 sum p_j + tol at every output step", CheckStatus::Pass};
  cs.details = {{"scope", "band propagations"}, {"threshold", config.thresholds.cauchy_schwarz}, {"enforced", true}};
  report.checks.push_back(std::move(cs));
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------- compare laws

ExperimentReport compare_laws(const ExperimentConfig& config, ResultWriter& writer, std::size_t workers) {
  const Model cattaneo = config.model();
  const Model fourier = cattaneo.with_tau(0.0);
  ExperimentReport report;
  report.kind = ExperimentKind::CompareLaws;
  report.header = {{"preset", config.preset.empty() ? json(nullptr) : json(config.preset)},
                   {"law", "both"},
                   {"regime", {{"cattaneo", to_string(detect_regime(cattaneo.params(), Law::Cattaneo))},
                               {"fourier", to_string(detect_regime(fourier.params(), Law::Fourier))}}},
                   {"seed", config.seed}};
  CauchySchwarzMonitor cs(cattaneo.b0());

  json laws = json::object();
  CsvTable rates({"law", "xi", "rho", "lambda_fit", "C_fit"});
  const Model* models[2] = {&cattaneo, &fourier};
  const Law law_list[2] = {Law::Cattaneo, Law::Fourier};
  for (int i = 0; i < 2; ++i) {
    const Law law = law_list[i];
    const Model& model = *models[i];
    const Regime regime = detect_regime(model.params(), law);
    json entry = run_sobolev(config, model, law, regime, workers, law_suffix(law), writer, report.checks, cs);
    const PointwiseOutcome o = pointwise_family(config, model, law, regime, workers, cs);
    entry["rates"] = fits_json(o.fits);
    for (const auto& f : o.fits) rates.add_row(to_string(law), {f.xi, f.rho, f.lambda_fit, f.c_fit});
    laws[to_string(law)] = entry;
  }
  report.results["laws"] = laws;
  writer.put("rates.csv", rates.str());

  // tau -> 0 sweep at a single wavenumber.
  const auto& red = config.reduction;
  IntegrationOptions opts = config.time;
  opts.t_end = red.t_end;
  opts.output_stride = red.output_stride;
  const double xi = red.xi;
  const Trajectory f = tracked_trajectory(make_state(config.initial, xi, fourier, Law::Fourier), xi, fourier,
                                          Law::Fourier, opts, cs);
  std::vector<double> diffs;
  json sweep = json::array();
  for (double tau : red.tau) {
    const Model m = cattaneo.with_tau(tau);
    const Trajectory c = tracked_trajectory(make_state(config.initial, xi, m, Law::Cattaneo), xi, m, Law::Cattaneo, opts, cs);
    const double d = tau_zero_reduction_check(c, m, f, fourier);
    diffs.push_back(d);
    sweep.push_back({{"tau", tau}, {"sup_relative_difference", d}});
  }
  report.results["reduction"] = {{"xi", xi}, {"sweep", sweep}};

  bool monotone = true;
  for (std::size_t i = 1; i < diffs.size(); ++i)
    if (!(diffs[i] < diffs[i - 1] || diffs[i] == 0.0)) monotone = false;
  const double last = diffs.empty() ? 0.0 : diffs.back();
  Check rc{"tau-reduction", "Cattaneo energy approaches Fourier energy monotonically as tau -> 0",
           pass_if(monotone && last <= config.thresholds.reduction)};
  rc.details = {{"smallest_tau_difference", last}, {"threshold", config.thresholds.reduction}, {"monotone", monotone}};
  if (rc.status == CheckStatus::Fail) rc.offending = {{"xi", xi}, {"sweep", sweep}};
  report.checks.push_back(std::move(rc));
  report.checks.push_back(cs.check(config.thresholds.cauchy_schwarz, "both laws"));
  return report;
}

ExperimentReport execute_experiment(const ExperimentConfig& config, ResultWriter& writer, std::size_t workers) {
  if (config.kind == ExperimentKind::CompareLaws) return compare_laws(config, writer, workers);
  const Model model = config.model();
  ExperimentReport report;
  report.kind = config.kind;
  report.header = header_for(config, model, config.law, config.resolved_regime());
  switch (config.kind) {
    case ExperimentKind::DissipationAudit:
      dissipation_audit(config, writer, workers, report);
      break;
    case ExperimentKind::PointwiseDecay:
      pointwise_decay(config, writer, workers, report);
      break;
    case ExperimentKind::SobolevDecay:
      sobolev_decay(config, writer, workers, report);
      break;
    case ExperimentKind::RegularityLoss:
      regularity_loss(config, writer, workers, report);
      break;
    case ExperimentKind::LyapunovAudit:
      lyapunov_audit(config, writer, workers, report);
      break;
    case ExperimentKind::ChiSweep:
      chi_sweep(config, writer, workers, report);
      break;
    case ExperimentKind::CompareLaws:
      break;
  }
  return report;
}

RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::size_t workers) {
  RunOutcome outcome;
  const std::string started = iso_now();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n_workers = resolve_workers(workers ? workers : config.workers);
  ResultWriter writer(out_dir);
  json manifest = {{"version", THERMOBEAM_VERSION}, {"started_at", started}, {"workers", n_workers}};
  manifest["config"] = config.echo();
  manifest["config"]["output_dir"] = out_dir.string();
  double compute_seconds = 0.0;
  try {
    try {
      outcome.report = execute_experiment(config, writer, n_workers);
    } catch (const InvariantViolation& e) {
      // Raised by enforced invariants deep inside a propagation.
      ExperimentReport r;
      r.kind = config.kind;
      r.header = header_for(config, config.model(), config.law, config.resolved_regime());
      Check c{"memory-cauchy-schwarz", "invariants of the memory moments hold at every output step",
              CheckStatus::Fail};
      c.offending = {{"error", e.what()}};
      r.checks.push_back(std::move(c));
      outcome.report = std::move(r);
    }
    compute_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    writer.put_json("summary.json", outcome.report->summary());
    writer.flush();
    emit_plot_data(out_dir);
    outcome.exit_code = outcome.report->exit_code();
  } catch (const std::exception& e) {
    outcome.error = e.what();
    outcome.exit_code = 2;
    try {
      writer.flush();
    } catch (const std::exception&) {
    }
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  manifest["finished_at"] = iso_now();
  manifest["timings"] = {{"compute_seconds", compute_seconds}, {"total_seconds", total}};
  manifest["exit_code"] = outcome.exit_code;
  if (!outcome.error.empty()) manifest["error"] = outcome.error;
  if (outcome.report) {
    json checks = json::array();
    for (const auto& c : outcome.report->checks) checks.push_back({{"name", c.name}, {"status", to_string(c.status)}});
    manifest["checks"] = checks;
  }
  std::vector<std::string> files;
  if (std::filesystem::exists(out_dir)) {
    for (const auto& e : std::filesystem::directory_iterator(out_dir))
      if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path().filename().string());
  }
  std::sort(files.begin(), files.end());
  manifest["files"] = files;
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "manifest.json", dump_json(manifest));
  files.push_back("manifest.json");
  outcome.files = files;
  return outcome;
}

void write_error_manifest(const std::filesystem::path& out_dir, const std::string& config_path, const std::string& error) {
  json manifest = {{"version", THERMOBEAM_VERSION},
                   {"started_at", iso_now()},
                   {"finished_at", iso_now()},
                   {"config_path", config_path},
                   {"exit_code", 2},
                   {"error", error}};
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "manifest.json", dump_json(manifest));
}

// ---------------------------------------------------------------- plot data

namespace {

std::string two_column(const std::vector<std::pair<double, double>>& rows) {
  std::string out;
  for (const auto& [a, b] : rows) out += format_double(a) + " " + format_double(b) + "\n";
  return out;
}

std::string rho_table(Regime regime) {
  std::vector<std::pair<double, double>> rows;
  for (int i = 0; i <= 400; ++i) {
    const double xi = i / 20.0;
    rows.emplace_back(xi, rho(xi, regime));
  }
  return two_column(rows);
}

}  // namespace

std::vector<std::string> emit_plot_data(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DomainError("results directory '" + dir.string() + "' does not exist");
  std::vector<std::string> written;
  bool any = false;
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(dir)) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());

  for (const auto& path : entries) {
    const std::string name = path.filename().string();
    if (name.rfind("norms", 0) == 0 && path.extension() == ".csv") {
      const CsvData csv = read_csv(path);
      const std::size_t ct = csv.column("t"), cn = csv.column("norm_k0");
      std::vector<std::pair<double, double>> rows;
      for (const auto& r : csv.rows) {
        const double t = std::stod(r[ct]), n = std::stod(r[cn]);
        if (n > 0.0) rows.emplace_back(std::log1p(t), std::log(n));
      }
      const std::string out = "loglog_norm_k0" + name.substr(5, name.size() - 9) + ".dat";
      write_text_file(dir / out, two_column(rows));
      written.push_back(out);
      any = true;
    } else if (name == "halflife.csv") {
      const CsvData csv = read_csv(path);
      const std::size_t cc = csv.column("center"), ch = csv.column("half_life");
      std::vector<std::pair<double, double>> rows;
      for (const auto& r : csv.rows) rows.emplace_back(std::log(std::stod(r[cc])), std::log(std::stod(r[ch])));
      write_text_file(dir / "halflife.dat", two_column(rows));
      written.push_back("halflife.dat");
      any = true;
    }
  }

  const fs::path summary = dir / "summary.json";
  if (fs::exists(summary)) {
    any = true;
    std::ifstream in(summary);
    const json s = json::parse(in, nullptr, false);
    if (!s.is_discarded() && s.contains("regime") && s["regime"].is_string()) {
      write_text_file(dir / "rho.dat", rho_table(regime_from_string(s["regime"].get<std::string>())));
      written.push_back("rho.dat");
    }
  }
  if (!any) throw DomainError("no results to plot in '" + dir.string() + "'");
  write_text_file(dir / "rho_chi-zero.dat", rho_table(Regime::ChiZero));
  write_text_file(dir / "rho_chi-nonzero.dat", rho_table(Regime::ChiNonzero));
  written.push_back("rho_chi-zero.dat");
  written.push_back("rho_chi-nonzero.dat");
  return written;
}

std::string trajectory_file_name(Law law, double xi) {
  return "traj_law-" + to_string(law) + "_xi-" + format_double(xi) + ".csv";
}

std::string trajectory_csv(const Trajectory& traj) {
  const std::size_t modes = traj.states.empty() ? 0 : traj.states.front().modes();
  const bool has_q = !traj.states.empty() && traj.states.front().has_q();
  std::vector<std::string> header{"t"};
  for (const char* f : {"v", "u", "z", "y", "theta"}) {
    header.push_back(std::string(f) + "_re");
    header.push_back(std::string(f) + "_im");
  }
  if (has_q) {
    header.push_back("q_re");
    header.push_back("q_im");
  }
  for (std::size_t j = 1; j <= modes; ++j) {
    header.push_back("w" + std::to_string(j) + "_re");
    header.push_back("w" + std::to_string(j) + "_im");
    header.push_back("p" + std::to_string(j));
  }
  CsvTable table(header);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const FrequencyState& s = traj.states[k];
    std::vector<double> row{traj.times[k]};
    for (cplx c : {s.v, s.u, s.z, s.y, s.theta}) {
      row.push_back(c.real());
      row.push_back(c.imag());
    }
    if (has_q) {
      row.push_back(s.q->real());
      row.push_back(s.q->imag());
    }
    for (std::size_t j = 0; j < modes; ++j) {
      row.push_back(s.w[j].real());
      row.push_back(s.w[j].imag());
      row.push_back(s.p[j]);
    }
    table.add_row(row);
  }
  return table.str();
}

}  // namespace thermobeam
