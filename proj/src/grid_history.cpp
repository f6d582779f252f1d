#include "thermobeam/grid_history.hpp"

#include <algorithm>
#include <cmath>

#include "thermobeam/dynamics.hpp"
#include "thermobeam/error.hpp"

namespace thermobeam {

namespace {

constexpr cplx I{0.0, 1.0};

int point_size(Law law) { return law == Law::Cattaneo ? 6 : 5; }

Eigen::VectorXcd pack_point(const GridHistoryState& s) {
  Eigen::VectorXcd p(s.q ? 6 : 5);
  p << s.v, s.u, s.z, s.y, s.theta;
  if (s.q) p[5] = *s.q;
  return p;
}

void unpack_point(const Eigen::VectorXcd& p, GridHistoryState& s) {
  s.v = p[0];
  s.u = p[1];
  s.z = p[2];
  s.y = p[3];
  s.theta = p[4];
  if (p.size() == 6) s.q = p[5];
}

// Point-field derivative with the memory integral supplied.
Eigen::VectorXcd point_rhs(const Eigen::VectorXcd& p, cplx memory, double xi, const Model& model, Law law) {
  const auto& pr = model.params();
  const cplx ixi = I * xi;
  Eigen::VectorXcd d(p.size());
  d[0] = ixi * p[1] - p[3];
  d[1] = ixi * pr.k / pr.rho1 * p[0];
  d[2] = ixi * p[3];
  d[3] = (ixi * model.a() * p[2] - pr.m * xi * xi * memory + pr.k * p[0] - ixi * pr.delta * p[4]) / pr.rho2;
  if (law == Law::Cattaneo) {
    d[4] = (-ixi * p[5] - ixi * pr.delta * p[3]) / pr.rho3;
    d[5] = (-pr.beta * p[5] - ixi * p[4]) / pr.tau;
  } else {
    d[4] = (-pr.beta_tilde() * xi * xi * p[4] - ixi * pr.delta * p[3]) / pr.rho3;
  }
  return d;
}

Eigen::VectorXd weighted_kernel(const SGrid& grid, const MemoryKernel& kernel) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(grid.nodes));
  const double ds = grid.ds();
  // Composite Simpson; with an odd number of intervals the last one is a trapezoid.
  const std::size_t simpson_end = grid.nodes % 2 == 1 ? grid.nodes - 1 : grid.nodes - 2;
  std::vector<double> w(grid.nodes, 0.0);
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += ds / 3.0;
    w[i + 1] += 4.0 * ds / 3.0;
    w[i + 2] += ds / 3.0;
  }
  if (simpson_end + 1 < grid.nodes) {
    w[simpson_end] += 0.5 * ds;
    w[simpson_end + 1] += 0.5 * ds;
  }
  for (std::size_t i = 0; i < grid.nodes; ++i) c[static_cast<Eigen::Index>(i)] = w[i] * kernel(grid.node(i));
  return c;
}

Eigen::VectorXcd mol_rhs(const Eigen::VectorXcd& x, const Eigen::VectorXd& gw, double xi, const Model& model,
                         Law law, double ds) {
  const int np = point_size(law);
  const Eigen::Index ns = x.size() - np;
  const auto eta = x.tail(ns);
  const cplx memory = (gw.cast<cplx>().array() * eta.array()).sum();
  Eigen::VectorXcd d(x.size());
  d.head(np) = point_rhs(x.head(np), memory, xi, model, law);
  const cplx y = x[3];
  d[np] = 0.0;
  for (Eigen::Index i = 1; i < ns; ++i) d[np + i] = -(eta[i] - eta[i - 1]) / ds + y;
  return d;
}

}  // namespace

void SGrid::validate() const {
  if (nodes < 2) throw InvalidParameters("s-grid needs at least 2 nodes");
  if (!(s_max > 0.0)) throw InvalidParameters("s-grid s_max must be positive");
}

SGrid SGrid::for_kernel(const MemoryKernel& kernel, std::size_t nodes, double span) {
  const double rate = kernel.empty() ? 1.0 : kernel.min_rate();
  return SGrid{span / rate, nodes};
}

GridHistoryState make_grid_state(const FrequencyState& point, const SGrid& grid) {
  grid.validate();
  for (auto w : point.w)
    if (w != cplx{}) throw DomainError("the s-grid solver starts from zero history only");
  for (auto p : point.p)
    if (p != 0.0) throw DomainError("the s-grid solver starts from zero history only");
  GridHistoryState s;
  s.v = point.v;
  s.u = point.u;
  s.z = point.z;
  s.y = point.y;
  s.theta = point.theta;
  s.q = point.q;
  s.eta = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.nodes));
  return s;
}

HistoryIntegrals history_integrals(const Eigen::VectorXcd& eta, const SGrid& grid, const MemoryKernel& kernel) {
  if (eta.size() != static_cast<Eigen::Index>(grid.nodes)) throw ShapeError("eta does not match the s-grid");
  const Eigen::VectorXd gw = weighted_kernel(grid, kernel);
  HistoryIntegrals out;
  out.first = (gw.cast<cplx>().array() * eta.array()).sum();
  out.second = (gw.array() * eta.array().abs2()).sum();
  return out;
}

GridHistoryState rhs_grid_history(const GridHistoryState& state, double xi, const Model& model, Law law,
                                  const SGrid& grid) {
  grid.validate();
  if ((law == Law::Cattaneo) != state.q.has_value()) throw ShapeError("grid state q does not match the law");
  if (state.eta.size() != static_cast<Eigen::Index>(grid.nodes)) throw ShapeError("eta does not match the s-grid");
  Eigen::VectorXcd x(point_size(law) + state.eta.size());
  x << pack_point(state), state.eta;
  const Eigen::VectorXcd d = mol_rhs(x, weighted_kernel(grid, model.kernel()), xi, model, law, grid.ds());
  GridHistoryState out;
  out.q = state.q;
  unpack_point(d.head(point_size(law)), out);
  out.eta = d.tail(state.eta.size());
  return out;
}

double grid_energy(const GridHistoryState& s, double xi, const Model& model, Law law, const SGrid& grid) {
  const auto& pr = model.params();
  double e = pr.rho1 * std::norm(s.u) + pr.rho2 * std::norm(s.y) + pr.k * std::norm(s.v) +
             model.a() * std::norm(s.z) + pr.rho3 * std::norm(s.theta);
  if (law == Law::Cattaneo) e += pr.tau * std::norm(*s.q);
  return e + pr.m * xi * xi * history_integrals(s.eta, grid, model.kernel()).second;
}

GridRun integrate_grid_history(const FrequencyState& initial, double xi, const Model& model, Law law,
                               const SGrid& grid, const GridRunOptions& opts) {
  check_shape(initial, law, model.modes());
  GridHistoryState state = make_grid_state(initial, grid);
  const double ds = grid.ds();
  const auto steps = static_cast<std::size_t>(std::floor(opts.t_end / ds + 1e-9));
  const Eigen::VectorXd gw = weighted_kernel(grid, model.kernel());
  const int np = point_size(law);

  IntegrationOptions cap;
  cap.c_stab = opts.c_stab;
  cap.dt_max = ds;
  std::size_t n = std::max(opts.substeps, substeps(ds, xi, model, law, cap));

  GridRun run;
  run.times.reserve(steps + 1);
  run.energy.reserve(steps + 1);
  auto record = [&](double t) {
    run.times.push_back(t);
    run.energy.push_back(grid_energy(state, xi, model, law, grid));
    run.max_inflow = std::max(run.max_inflow, std::abs(state.eta[0]));
  };
  record(0.0);

  if (opts.scheme == GridScheme::MethodOfLines) {
    if (opts.dt_max > ds) throw CflViolation("method-of-lines step exceeds ds (CFL)");
    if (opts.dt_max > 0.0) n = std::max(n, static_cast<std::size_t>(std::ceil(ds / opts.dt_max * (1.0 - 1e-12))));
    const double h = ds / static_cast<double>(n);
    Eigen::VectorXcd x(np + state.eta.size());
    x << pack_point(state), state.eta;
    for (std::size_t k = 1; k <= steps; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXcd k1 = mol_rhs(x, gw, xi, model, law, ds);
        const Eigen::VectorXcd k2 = mol_rhs(x + 0.5 * h * k1, gw, xi, model, law, ds);
        const Eigen::VectorXcd k3 = mol_rhs(x + 0.5 * h * k2, gw, xi, model, law, ds);
        const Eigen::VectorXcd k4 = mol_rhs(x + h * k3, gw, xi, model, law, ds);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      unpack_point(x.head(np), state);
      state.eta = x.tail(state.eta.size());
      record(static_cast<double>(k) * ds);
    }
    return run;
  }

  // Characteristic scheme: eta(t_n + r, s_i) = interpolated eta(t_n, s_i - r) + Psi(r),
  // Psi' = y, so the memory integral is affine in r/ds and in Psi during the step.
  const double h = ds / static_cast<double>(n);
  const Eigen::Index ns = state.eta.size();
  const double g_tail = gw.tail(ns - 1).sum();
  for (std::size_t k = 1; k <= steps; ++k) {
    Eigen::VectorXcd shifted(ns);
    shifted[0] = 0.0;
    shifted.tail(ns - 1) = state.eta.head(ns - 1);
    const cplx a0 = (gw.cast<cplx>().array() * state.eta.array()).sum();
    const cplx a1 = (gw.cast<cplx>().array() * shifted.array()).sum();

    Eigen::VectorXcd x(np + 1);
    x << pack_point(state), 0.0;
    auto f = [&](double r, const Eigen::VectorXcd& xs) {
      const double theta = r / ds;
      const cplx memory = (1.0 - theta) * a0 + theta * a1 + xs[np] * g_tail;
      Eigen::VectorXcd d(np + 1);
      d.head(np) = point_rhs(xs.head(np), memory, xi, model, law);
      d[np] = xs[3];
      return d;
    };
    for (std::size_t i = 0; i < n; ++i) {
      const double r = static_cast<double>(i) * h;
      const Eigen::VectorXcd k1 = f(r, x);
      const Eigen::VectorXcd k2 = f(r + 0.5 * h, x + 0.5 * h * k1);
      const Eigen::VectorXcd k3 = f(r + 0.5 * h, x + 0.5 * h * k2);
      const Eigen::VectorXcd k4 = f(r + h, x + h * k3);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    unpack_point(x.head(np), state);
    const cplx psi = x[np];
    state.eta = shifted;
    state.eta.tail(ns - 1).array() += psi;
    record(static_cast<double>(k) * ds);
  }
  return run;
}

}  // namespace thermobeam
