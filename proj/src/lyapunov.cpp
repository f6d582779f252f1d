#include "thermobeam/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "thermobeam/energy.hpp"
#include "thermobeam/error.hpp"

namespace thermobeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> functionals_of(const FrequencyState& s, double xi, const Model& model, Law law) {
  std::vector<double> f;
  if (law == Law::Cattaneo) {
    for (int i = 1; i <= 4; ++i) f.push_back(functional_J(i, s, xi, model));
  } else {
    for (int i = 1; i <= 3; ++i) f.push_back(functional_K(i, s, xi, model));
  }
  return f;
}

double combine(const std::vector<double>& f, double e, double xi, const LyapunovCoefficients& c) {
  const auto factors = weight_factors(xi, c.regime);
  double l = 0.0;
  for (std::size_t i = 0; i < 3; ++i) l += c.weights[i] * factors[i] * f[i];
  if (f.size() == 4) l += f[3];
  const double base = 1.0 + xi * xi;
  return l + c.N * base * base * e;
}

void check_regime(const Model& model, const LyapunovCoefficients& c) {
  const Regime actual = detect_regime(model.params(), c.law);
  if (actual != c.regime) {
    throw RegimeMismatch("coefficients are for " + to_string(c.regime) + " but the " + to_string(c.law) +
                         " stability number puts the model in " + to_string(actual));
  }
}

}  // namespace

void LyapunovCoefficients::validate() const {
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidParameters("Lyapunov weights must be positive");
  if (!(N > 0.0) || !std::isfinite(N)) throw InvalidParameters("Lyapunov N must be positive");
}

std::array<double, 3> weight_factors(double xi, Regime regime) {
  const double x2 = xi * xi;
  const double base = 1.0 + x2;
  if (regime == Regime::ChiZero) return {x2, x2 / base, 1.0};
  return {x2 / base, x2 / (base * base), 1.0};
}

FunctionalSet assemble_lyapunov(const FrequencyState& state, double xi, const Model& model,
                                const LyapunovCoefficients& coeffs) {
  check_regime(model, coeffs);
  FunctionalSet set;
  set.coefficients = coeffs;
  set.E = energy(state, xi, model, coeffs.law).total;
  set.functionals = functionals_of(state, xi, model, coeffs.law);
  set.L = combine(set.functionals, set.E, xi, coeffs);
  return set;
}

double recombine(const FunctionalSet& set, double xi) { return combine(set.functionals, set.E, xi, set.coefficients); }

Eigen::MatrixXcd polarize(const StateLayout& layout, const std::function<double(const FrequencyState&)>& f) {
  const int n = layout.size();
  const std::vector<double> p0(layout.modes, 0.0);
  auto eval = [&](const Eigen::VectorXcd& x) { return f(from_linear(x, layout, p0)); };
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) h(a, a) = eval(Eigen::VectorXcd::Unit(n, a));
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const Eigen::VectorXcd ea = Eigen::VectorXcd::Unit(n, a);
      const Eigen::VectorXcd eb = Eigen::VectorXcd::Unit(n, b);
      const double haa = h(a, a).real(), hbb = h(b, b).real();
      const double re = 0.5 * (eval(ea + eb) - haa - hbb);
      const double im = 0.5 * (haa + hbb - eval(ea + cplx{0.0, 1.0} * eb));
      h(a, b) = cplx{re, im};
      h(b, a) = cplx{re, -im};
    }
  }
  return h;
}

LyapunovForm::LyapunovForm(double xi, const Model& model, const LyapunovCoefficients& coeffs)
    : xi_(xi),
      rho_(thermobeam::rho(xi, coeffs.regime)),
      layout_(StateLayout::of(coeffs.law, model.modes())),
      kernel_(model.kernel()) {
  const Law law = coeffs.law;
  h_ = polarize(layout_, [&](const FrequencyState& s) {
    return combine(functionals_of(s, xi, model, law), energy(s, xi, model, law).total, xi, coeffs);
  });
  const Eigen::MatrixXcd a = system_matrix(xi, model, law);
  hdot_ = a.adjoint() * h_ + h_ * a;
  const double base = 1.0 + xi * xi;
  cp_ = coeffs.N * base * base * model.params().m * xi * xi;
}

double LyapunovForm::value(const FrequencyState& s) const {
  const Eigen::VectorXcd x = linear_part(s);
  return x.dot(h_ * x).real() + cp_ * s.second_moment_sum();
}

double LyapunovForm::rate(const FrequencyState& s) const {
  const Eigen::VectorXcd x = linear_part(s);
  double memory = 0.0;
  for (std::size_t j = 0; j < s.modes(); ++j) {
    memory += 2.0 * std::real(s.y * std::conj(s.w[j])) - kernel_.modes[j].mu * s.p[j];
  }
  return x.dot(hdot_ * x).real() + cp_ * memory;
}

double LyapunovForm::certified_gamma() const {
  if (rho_ == 0.0) return kInf;
  Eigen::MatrixXcd lower = h_;
  Eigen::MatrixXcd rate = hdot_;
  for (std::size_t j = 0; j < kernel_.size(); ++j) {
    const auto& mode = kernel_.modes[j];
    const int w = layout_.w(j);
    // Worst admissible second moment p_j = (mu_j / g_j) |w_j|^2.
    lower(w, w) += cp_ * mode.mu / mode.g;
    rate(w, StateLayout::y) += cp_;
    rate(StateLayout::y, w) += cp_;
    rate(w, w) -= cp_ * mode.mu * mode.mu / mode.g;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> lower_eig(lower);
  if (lower_eig.eigenvalues().minCoeff() <= 0.0) return -kInf;
  const Eigen::MatrixXcd inv_sqrt = lower_eig.operatorInverseSqrt();
  const Eigen::MatrixXcd t = inv_sqrt * (-rate) * inv_sqrt;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> t_eig(0.5 * (t + t.adjoint()), Eigen::EigenvaluesOnly);
  double g = t_eig.eigenvalues().minCoeff();
  if (!kernel_.empty()) g = std::min(g, kernel_.min_rate());
  return g / rho_;
}

FrequencyState sample_state(std::mt19937_64& rng, const Model& model, Law law, bool zero_history) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::exponential_distribution<double> tail(1.0);
  std::bernoulli_distribution coin(0.5);
  auto draw = [&] {
    const double re = normal(rng);
    const double im = normal(rng);
    return cplx{re, im};
  };
  FrequencyState s = FrequencyState::zero(law, model.modes());
  s.v = draw();
  s.u = draw();
  s.z = draw();
  s.y = draw();
  s.theta = draw();
  if (law == Law::Cattaneo) s.q = draw();
  if (!zero_history) {
    for (std::size_t j = 0; j < s.modes(); ++j) {
      const auto& mode = model.kernel().modes[j];
      s.w[j] = draw();
      const double slack = coin(rng) ? 0.0 : tail(rng);
      s.p[j] = mode.mu / mode.g * std::norm(s.w[j]) * (1.0 + slack);
    }
  }
  return s;
}

EquivalenceResult verify_equivalence(const Model& model, const LyapunovCoefficients& coeffs,
                                     const std::vector<double>& xi_grid, std::size_t samples_per_xi,
                                     std::uint64_t seed) {
  check_regime(model, coeffs);
  std::mt19937_64 rng(seed);
  EquivalenceResult out;
  for (double xi : xi_grid) {
    const double base = (1.0 + xi * xi) * (1.0 + xi * xi);
    for (std::size_t i = 0; i < samples_per_xi; ++i) {
      const FrequencyState s = sample_state(rng, model, coeffs.law);
      const FunctionalSet set = assemble_lyapunov(s, xi, model, coeffs);
      if (set.E <= 0.0) continue;
      out.m2 = std::max(out.m2, std::abs(set.L - coeffs.N * base * set.E) / (base * set.E));
      ++out.samples;
    }
  }
  out.pass = out.samples > 0 && out.m2 < coeffs.N;
  return out;
}

RateCheck sampled_rate_check(const Model& model, const LyapunovCoefficients& coeffs,
                             const std::vector<double>& xi_grid, std::size_t samples_per_xi, std::uint64_t seed) {
  check_regime(model, coeffs);
  std::mt19937_64 rng(seed);
  RateCheck out;
  out.gamma = kInf;
  for (double xi : xi_grid) {
    const LyapunovForm form(xi, model, coeffs);
    if (form.rho() == 0.0) continue;
    for (std::size_t i = 0; i < samples_per_xi; ++i) {
      const FrequencyState s = sample_state(rng, model, coeffs.law);
      const double l = form.value(s);
      const double g = l > 0.0 ? -form.rate(s) / (form.rho() * l) : -kInf;
      if (g < out.gamma) {
        out.gamma = g;
        out.worst_xi = xi;
      }
      ++out.samples;
    }
  }
  out.pass = out.samples > 0 && out.gamma > 0.0;
  return out;
}

namespace {

struct Score {
  double gamma = -kInf;
  double worst_xi = 0.0;
};

LyapunovCoefficients from_exponents(const std::array<int, 4>& e, Law law, Regime regime) {
  LyapunovCoefficients c;
  c.law = law;
  c.regime = regime;
  for (std::size_t i = 0; i < 3; ++i) c.weights[i] = std::ldexp(1.0, e[i]);
  c.N = std::ldexp(1.0, e[3]);
  return c;
}

Score score(const Model& model, const LyapunovCoefficients& c, const std::vector<double>& grid) {
  Score s;
  s.gamma = kInf;
  for (double xi : grid) {
    const double g = LyapunovForm(xi, model, c).certified_gamma();
    if (g < s.gamma) {
      s.gamma = g;
      s.worst_xi = xi;
    }
  }
  return s;
}

}  // namespace

CalibrationResult calibrate_coefficients(const Model& model, Law law, Regime regime, const CalibrationOptions& opts) {
  if (detect_regime(model.params(), law) != regime) {
    throw RegimeMismatch("requested " + to_string(regime) + " calibration for a model in the other regime");
  }
  if (opts.xi_grid.empty()) throw InvalidParameters("calibration grid is empty");

  // Coarse scan of the exponents, then coordinate doubling/halving from the best point.
  std::array<int, 4> best{0, 0, 0, 0};
  Score best_score;
  const int coarse = opts.coarse_step;
  for (int e2 = -2 * coarse; e2 <= 2 * coarse; e2 += coarse) {
    for (int e1 = -2 * coarse; e1 <= 2 * coarse; e1 += coarse) {
      for (int e3 = -2 * coarse; e3 <= 2 * coarse; e3 += coarse) {
        for (int eN = 0; eN <= 5 * coarse; eN += coarse) {
          const std::array<int, 4> trial{e1, e2, e3, eN};
          const Score s = score(model, from_exponents(trial, law, regime), opts.xi_grid);
          if (s.gamma > best_score.gamma) {
            best = trial;
            best_score = s;
          }
        }
      }
    }
  }

  const std::array<std::size_t, 4> order{1, 0, 2, 3};
  std::size_t sweep = 0;
  for (; sweep < opts.max_sweeps; ++sweep) {
    bool improved = false;
    for (std::size_t coord : order) {
      for (int dir : {+1, -1}) {
        while (true) {
          std::array<int, 4> trial = best;
          trial[coord] += dir;
          if (std::abs(trial[coord]) > opts.max_exponent) break;
          const Score s = score(model, from_exponents(trial, law, regime), opts.xi_grid);
          if (!(s.gamma > best_score.gamma * (1.0 + 1e-9) + 1e-300) || s.gamma == -kInf) break;
          best = trial;
          best_score = s;
          improved = true;
        }
      }
    }
    if (!improved) break;
  }

  auto failure = [&](const std::string& what) {
    std::ostringstream msg;
    msg << what << " (" << to_string(law) << ", " << to_string(regime) << ", worst xi=" << best_score.worst_xi
        << ", certified gamma=" << best_score.gamma << ")";
    return CalibrationFailure(msg.str());
  };
  if (!(best_score.gamma > 0.0)) throw failure("no admissible Lyapunov weights found");

  CalibrationResult out;
  out.coefficients = from_exponents(best, law, regime);
  out.gamma_certified = best_score.gamma;
  out.sweeps = sweep;
  const EquivalenceResult eq =
      verify_equivalence(model, out.coefficients, opts.xi_grid, opts.samples_per_xi, opts.seed);
  out.m2 = eq.m2;
  if (!eq.pass) throw failure("equivalence check failed on sampled states");
  const RateCheck rate =
      sampled_rate_check(model, out.coefficients, opts.xi_grid, opts.samples_per_xi, opts.seed + 1);
  out.gamma_sampled = rate.gamma;
  if (!rate.pass) throw failure("sampled rate check failed");
  return out;
}

RateCheck certify_trajectories(const Model& model, const LyapunovCoefficients& coeffs,
                               const std::vector<double>& xi_grid, std::size_t trajectories, double t_end,
                               double output_stride, std::uint64_t seed) {
  check_regime(model, coeffs);
  if (xi_grid.empty()) throw InvalidParameters("trajectory grid is empty");
  const auto [lo, hi] = std::minmax_element(xi_grid.begin(), xi_grid.end());
  if (!(*lo > 0.0)) throw InvalidParameters("trajectory wavenumbers must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> log_xi(std::log(*lo), std::log(*hi));
  IntegrationOptions opts;
  opts.t_end = t_end;
  opts.output_stride = output_stride;
  RateCheck out;
  out.gamma = kInf;
  for (std::size_t i = 0; i < trajectories; ++i) {
    const double xi = std::exp(log_xi(rng));
    const FrequencyState init = sample_state(rng, model, coeffs.law);
    const LyapunovForm form(xi, model, coeffs);
    integrate_visit(init, xi, model, coeffs.law, opts, [&](std::size_t, double t, const FrequencyState& s) {
      const double l = form.value(s);
      if (l < 1e-250) return;
      const double g = -form.rate(s) / (form.rho() * l);
      if (g < out.gamma) {
        out.gamma = g;
        out.worst_xi = xi;
        out.worst_t = t;
      }
      ++out.samples;
    });
  }
  out.pass = out.samples > 0 && out.gamma > 0.0;
  return out;
}

}  // namespace thermobeam
