#include "thermobeam/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "thermobeam/energy.hpp"
#include "thermobeam/error.hpp"

namespace thermobeam {

namespace {

constexpr cplx I{0.0, 1.0};

FrequencyState rhs_common(const FrequencyState& s, double xi, const Model& model) {
  const auto& pr = model.params();
  const auto& modes = model.kernel().modes;
  FrequencyState d = s;
  const cplx ixi = I * xi;
  d.v = ixi * s.u - s.y;
  d.u = ixi * pr.k / pr.rho1 * s.v;
  d.z = ixi * s.y;
  d.y = (ixi * model.a() * s.z - pr.m * xi * xi * s.memory_sum() + pr.k * s.v - ixi * pr.delta * s.theta) /
        pr.rho2;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    d.w[j] = modes[j].g / modes[j].mu * s.y - modes[j].mu * s.w[j];
    d.p[j] = 2.0 * std::real(s.y * std::conj(s.w[j])) - modes[j].mu * s.p[j];
  }
  return d;
}

}  // namespace

FrequencyState rhs_cattaneo(const FrequencyState& s, double xi, const Model& model) {
  const auto& pr = model.params();
  if (!(pr.tau > 0.0)) throw LawMismatch("Cattaneo law requested with tau = 0; use the Fourier law");
  check_shape(s, Law::Cattaneo, model.modes());
  FrequencyState d = rhs_common(s, xi, model);
  const cplx ixi = I * xi;
  d.theta = (-ixi * *s.q - ixi * pr.delta * s.y) / pr.rho3;
  d.q = (-pr.beta * *s.q - ixi * s.theta) / pr.tau;
  return d;
}

FrequencyState rhs_fourier(const FrequencyState& s, double xi, const Model& model) {
  const auto& pr = model.params();
  check_shape(s, Law::Fourier, model.modes());
  FrequencyState d = rhs_common(s, xi, model);
  d.theta = (-pr.beta_tilde() * xi * xi * s.theta - I * xi * pr.delta * s.y) / pr.rho3;
  return d;
}

FrequencyState rhs(const FrequencyState& state, double xi, const Model& model, Law law) {
  return law == Law::Cattaneo ? rhs_cattaneo(state, xi, model) : rhs_fourier(state, xi, model);
}

Eigen::MatrixXcd system_matrix(double xi, const Model& model, Law law) {
  const auto& pr = model.params();
  if (law == Law::Cattaneo && !(pr.tau > 0.0)) {
    throw LawMismatch("Cattaneo law requested with tau = 0; use the Fourier law");
  }
  const auto& modes = model.kernel().modes;
  const StateLayout L = StateLayout::of(law, modes.size());
  using S = StateLayout;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(L.size(), L.size());
  const cplx ixi = I * xi;
  a(S::v, S::u) = ixi;
  a(S::v, S::y) = -1.0;
  a(S::u, S::v) = ixi * pr.k / pr.rho1;
  a(S::z, S::y) = ixi;
  a(S::y, S::z) = ixi * model.a() / pr.rho2;
  a(S::y, S::v) = pr.k / pr.rho2;
  a(S::y, S::theta) = -ixi * pr.delta / pr.rho2;
  a(S::theta, S::y) = -ixi * pr.delta / pr.rho3;
  if (law == Law::Cattaneo) {
    a(S::theta, L.q()) = -ixi / pr.rho3;
    a(L.q(), L.q()) = -pr.beta / pr.tau;
    a(L.q(), S::theta) = -ixi / pr.tau;
  } else {
    a(S::theta, S::theta) = -pr.beta_tilde() * xi * xi / pr.rho3;
  }
  for (std::size_t j = 0; j < modes.size(); ++j) {
    a(S::y, L.w(j)) = -pr.m * xi * xi / pr.rho2;
    a(L.w(j), S::y) = modes[j].g / modes[j].mu;
    a(L.w(j), L.w(j)) = -modes[j].mu;
  }
  return a;
}

double spectral_radius(const Eigen::MatrixXcd& a) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void IntegrationOptions::validate() const {
  if (!(dt_max > 0.0)) throw InvalidParameters("dt_max must be positive");
  if (!(output_stride > 0.0)) throw InvalidParameters("output_stride must be positive");
  if (!(t_end >= 0.0)) throw InvalidParameters("t_end must be non-negative");
  if (!(c_stab > 0.0)) throw InvalidParameters("c_stab must be positive");
}

std::size_t substeps(double span, double xi, const Model& model, Law law, const IntegrationOptions& opts) {
  if (span <= 0.0) return 0;
  double cap = std::min(opts.dt_max, opts.c_stab / (1.0 + std::abs(xi)));
  const double radius = spectral_radius(system_matrix(xi, model, law));
  if (radius > 0.0) cap = std::min(cap, opts.c_stab / radius);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / cap * (1.0 - 1e-12))));
}

Propagator Propagator::identity(const StateLayout& layout) {
  Propagator p;
  p.layout_ = layout;
  p.m_ = Eigen::MatrixXcd::Identity(layout.size(), layout.size());
  p.r_ = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(layout.modes));
  p.q_.assign(layout.modes, Eigen::MatrixXcd::Zero(layout.size(), layout.size()));
  return p;
}

Propagator Propagator::rk4_step(const Eigen::MatrixXcd& a, const StateLayout& layout, const MemoryKernel& kernel,
                                double h) {
  const int n = layout.size();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd ha = h * a;
  const Eigen::MatrixXcd ha2 = ha * ha;
  const Eigen::MatrixXcd ha3 = ha2 * ha;
  const Eigen::MatrixXcd ha4 = ha3 * ha;

  Propagator p;
  p.layout_ = layout;
  p.m_ = id + ha + ha2 / 2.0 + ha3 / 6.0 + ha4 / 24.0;
  const std::array<Eigen::MatrixXcd, 4> stage = {id, id + ha / 2.0, id + ha / 2.0 + ha2 / 4.0,
                                                 id + ha + ha2 / 2.0 + ha3 / 4.0};

  p.r_.resize(static_cast<Eigen::Index>(layout.modes));
  p.q_.resize(layout.modes);
  for (std::size_t j = 0; j < layout.modes; ++j) {
    const double mu = kernel.modes[j].mu;
    // Each RK4 quantity for p is linear in (p, s1..s4) with s_i the forcing 2Re(y conj w) at stage i.
    using Lin = std::array<double, 5>;
    auto axpy = [](Lin x, double c, const Lin& y) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += c * y[i];
      return x;
    };
    auto slope = [mu](const Lin& state, int forcing) {
      Lin k{};
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = -mu * state[i];
      k[static_cast<std::size_t>(forcing)] += 1.0;
      return k;
    };
    const Lin p1{1.0, 0.0, 0.0, 0.0, 0.0};
    const Lin k1 = slope(p1, 1);
    const Lin k2 = slope(axpy(p1, h / 2.0, k1), 2);
    const Lin k3 = slope(axpy(p1, h / 2.0, k2), 3);
    const Lin k4 = slope(axpy(p1, h, k3), 4);
    Lin out = p1;
    out = axpy(out, h / 6.0, k1);
    out = axpy(out, h / 3.0, k2);
    out = axpy(out, h / 3.0, k3);
    out = axpy(out, h / 6.0, k4);

    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    s(layout.w(j), StateLayout::y) = 1.0;
    s(StateLayout::y, layout.w(j)) = 1.0;
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < 4; ++i) q += out[i + 1] * stage[i].adjoint() * s * stage[i];
    p.r_[static_cast<Eigen::Index>(j)] = out[0];
    p.q_[j] = q;
  }
  return p;
}

Propagator Propagator::rk4(double xi, const Model& model, Law law, double span, std::size_t n) {
  const StateLayout layout = StateLayout::of(law, model.modes());
  if (n == 0) return identity(layout);
  return rk4_step(system_matrix(xi, model, law), layout, model.kernel(), span / static_cast<double>(n)).power(n);
}

Propagator Propagator::then(const Propagator& next) const {
  Propagator out;
  out.layout_ = layout_;
  out.m_ = next.m_ * m_;
  out.r_ = next.r_.cwiseProduct(r_);
  out.q_.resize(q_.size());
  for (std::size_t j = 0; j < q_.size(); ++j) {
    out.q_[j] = next.r_[static_cast<Eigen::Index>(j)] * q_[j] + m_.adjoint() * next.q_[j] * m_;
  }
  return out;
}

Propagator Propagator::power(std::size_t n) const {
  Propagator result = identity(layout_);
  Propagator base = *this;
  while (n > 0) {
    if (n & 1U) result = result.then(base);
    n >>= 1U;
    if (n > 0) base = base.then(base);
  }
  return result;
}

void Propagator::apply(Eigen::VectorXcd& x, std::vector<double>& p) const {
  for (std::size_t j = 0; j < p.size(); ++j) {
    p[j] = r_[static_cast<Eigen::Index>(j)] * p[j] + x.dot(q_[j] * x).real();
  }
  x = m_ * x;
}

FrequencyState Propagator::apply(const FrequencyState& state) const {
  Eigen::VectorXcd x = linear_part(state);
  std::vector<double> p = state.p;
  apply(x, p);
  return from_linear(x, layout_, std::move(p));
}

FrequencyState rk4_reference(const FrequencyState& initial, double xi, const Model& model, Law law, double h,
                             std::size_t n) {
  FrequencyState s = initial;
  for (std::size_t i = 0; i < n; ++i) {
    const FrequencyState k1 = rhs(s, xi, model, law);
    const FrequencyState k2 = rhs(s + (h / 2.0) * k1, xi, model, law);
    const FrequencyState k3 = rhs(s + (h / 2.0) * k2, xi, model, law);
    const FrequencyState k4 = rhs(s + h * k3, xi, model, law);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return s;
}

std::vector<double> output_times(const IntegrationOptions& opts) {
  opts.validate();
  const auto count = static_cast<std::size_t>(std::floor(opts.t_end / opts.output_stride + 1e-9));
  std::vector<double> t(count + 1);
  for (std::size_t k = 0; k <= count; ++k) t[k] = static_cast<double>(k) * opts.output_stride;
  return t;
}

double integrate_visit(const FrequencyState& initial, double xi, const Model& model, Law law,
                       const IntegrationOptions& opts, const StateVisitor& visit) {
  check_shape(initial, law, model.modes());
  const std::vector<double> times = output_times(opts);
  const double b0 = model.b0();

  FrequencyState state = initial;
  enforce_invariants(state, b0, opts.tolerance);
  double worst = state.cauchy_schwarz_excess(b0);
  visit(0, 0.0, state);
  if (times.size() == 1) return worst;

  if (state.is_zero()) {
    for (std::size_t k = 1; k < times.size(); ++k) visit(k, times[k], state);
    return worst;
  }

  const StateLayout layout = StateLayout::of(law, model.modes());
  const Propagator step =
      Propagator::rk4(xi, model, law, opts.output_stride, substeps(opts.output_stride, xi, model, law, opts));
  Eigen::VectorXcd x = linear_part(state);
  std::vector<double> p = state.p;
  for (std::size_t k = 1; k < times.size(); ++k) {
    step.apply(x, p);
    state = from_linear(x, layout, p);
    if (!state.is_finite()) throw DivergenceError(xi, times[k], "non-finite state");
    enforce_invariants(state, b0, opts.tolerance);
    p = state.p;
    worst = std::max(worst, state.cauchy_schwarz_excess(b0));
    visit(k, times[k], state);
  }
  return worst;
}

Trajectory integrate(const FrequencyState& initial, double xi, const Model& model, Law law,
                     const IntegrationOptions& opts) {
  Trajectory traj;
  traj.xi = xi;
  traj.law = law;
  const std::size_t n = output_times(opts).size();
  traj.times.reserve(n);
  traj.states.reserve(n);
  traj.max_cs_excess = integrate_visit(initial, xi, model, law, opts, [&](std::size_t, double t, const FrequencyState& s) {
    traj.times.push_back(t);
    traj.states.push_back(s);
  });
  return traj;
}

FrequencyState advance(const FrequencyState& initial, double xi, const Model& model, Law law, double t,
                       const IntegrationOptions& opts) {
  check_shape(initial, law, model.modes());
  if (initial.is_zero() || t <= 0.0) return initial;
  FrequencyState s = Propagator::rk4(xi, model, law, t, substeps(t, xi, model, law, opts)).apply(initial);
  if (!s.is_finite()) throw DivergenceError(xi, t, "non-finite state");
  enforce_invariants(s, model.b0(), opts.tolerance);
  return s;
}

double tau_zero_reduction_check(const Trajectory& cattaneo, const Model& cattaneo_model, const Trajectory& fourier,
                                const Model& fourier_model, double eps) {
  if (cattaneo.size() != fourier.size() || cattaneo.size() == 0) {
    throw GridMismatch("trajectories have different output grids");
  }
  for (std::size_t k = 0; k < cattaneo.size(); ++k) {
    if (std::abs(cattaneo.times[k] - fourier.times[k]) > 1e-12 * std::max(1.0, std::abs(fourier.times[k]))) {
      throw GridMismatch("trajectories have different output times");
    }
  }
  if (cattaneo.xi != fourier.xi) throw GridMismatch("trajectories are at different wavenumbers");
  const double scale =
      std::max(energy(fourier.states.front(), fourier.xi, fourier_model, Law::Fourier).total, eps);
  double sup = 0.0;
  for (std::size_t k = 0; k < cattaneo.size(); ++k) {
    const double ec = energy(cattaneo.states[k], cattaneo.xi, cattaneo_model, Law::Cattaneo).total;
    const double ef = energy(fourier.states[k], fourier.xi, fourier_model, Law::Fourier).total;
    sup = std::max(sup, std::abs(ec - ef) / scale);
  }
  return sup;
}

}  // namespace thermobeam
