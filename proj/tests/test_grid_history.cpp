#include "doctest.h"
#include "support.hpp"
#include "thermobeam/dynamics.hpp"
#include "thermobeam/energy.hpp"
#include "thermobeam/error.hpp"
#include "thermobeam/grid_history.hpp"

using namespace thermobeam;

TEST_SUITE("grid_history") {
  TEST_CASE("grid layout") {
    const SGrid g = SGrid::for_kernel(MemoryKernel{{{0.5, 1.0}, {0.1, 0.25}}}, 2000);
    CHECK(g.s_max == doctest::Approx(160.0));
    CHECK(g.node(g.nodes - 1) == doctest::Approx(g.s_max));
    SGrid bad;
    bad.nodes = 1;
    CHECK_THROWS_AS(bad.validate(), InvalidParameters);
  }

  TEST_CASE("zero state has zero derivative") {
    const Model m = testing::preset_model("regime-zero");
    const SGrid g = SGrid::for_kernel(m.kernel(), 200);
    const GridHistoryState s = make_grid_state(FrequencyState::zero(Law::Cattaneo, 1), g);
    const GridHistoryState d = rhs_grid_history(s, 1.0, m, Law::Cattaneo, g);
    CHECK(d.eta.norm() == 0.0);
    CHECK(std::abs(d.v) + std::abs(d.u) + std::abs(d.y) + std::abs(*d.q) == 0.0);
  }

  TEST_CASE("constant y drives eta uniformly") {
    const Model m = testing::preset_model("regime-zero");
    const SGrid g = SGrid::for_kernel(m.kernel(), 100);
    FrequencyState p = FrequencyState::zero(Law::Fourier, 1);
    p.y = 1.0;
    const GridHistoryState s = make_grid_state(p, g);
    const GridHistoryState d = rhs_grid_history(s, 1.0, m, Law::Fourier, g);
    CHECK(d.eta[0] == cplx(0.0, 0.0));
    for (Eigen::Index i = 1; i < d.eta.size(); ++i) CHECK(std::abs(d.eta[i] - 1.0) < 1e-15);
  }

  TEST_CASE("history integrals by quadrature") {
    const Model m = testing::preset_model("regime-zero");
    const SGrid g = SGrid::for_kernel(m.kernel(), 4001);
    Eigen::VectorXcd eta = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(g.nodes));
    const HistoryIntegrals h = history_integrals(eta, g, m.kernel());
    CHECK(h.first.real() == doctest::Approx(m.b0()).epsilon(1e-4));
    CHECK(h.second == doctest::Approx(m.b0()).epsilon(1e-4));
  }

  TEST_CASE("history moments rule out nonzero initial history") {
    const Model m = testing::preset_model("regime-zero");
    FrequencyState p = FrequencyState::zero(Law::Cattaneo, 1);
    p.w[0] = 0.1;
    p.p[0] = 1.0;
    CHECK_THROWS(make_grid_state(p, SGrid::for_kernel(m.kernel(), 100)));
  }

  TEST_CASE("method of lines rejects a step above ds") {
    const Model m = testing::preset_model("regime-zero");
    const SGrid g = SGrid::for_kernel(m.kernel(), 201);
    FrequencyState p = FrequencyState::zero(Law::Cattaneo, 1);
    p.y = 1.0;
    GridRunOptions o;
    o.t_end = 1.0;
    o.scheme = GridScheme::MethodOfLines;
    o.dt_max = 2.0 * g.ds();
    CHECK_THROWS_AS(integrate_grid_history(p, 1.0, m, Law::Cattaneo, g, o), CflViolation);
  }

  TEST_CASE("both grid schemes track the moment closure") {
    const Model m = testing::preset_model("regime-zero");
    FrequencyState p = FrequencyState::zero(Law::Cattaneo, 1);
    p.v = 1.0;
    p.u = cplx(0.0, 1.0);
    p.y = 0.5;
    p.theta = 0.3;
    *p.q = 0.2;
    const double xi = 1.0;
    const SGrid g = SGrid::for_kernel(m.kernel(), 2000);
    GridRunOptions o;
    o.t_end = 10.0;
    const GridRun run = integrate_grid_history(p, xi, m, Law::Cattaneo, g, o);
    IntegrationOptions io;
    io.t_end = run.times.back();
    io.output_stride = g.ds();
    const Trajectory t = integrate(p, xi, m, Law::Cattaneo, io);
    REQUIRE(t.size() == run.times.size());
    double err = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double e = energy(t.states[k], xi, m, Law::Cattaneo).total;
      err = std::max(err, std::abs(e - run.energy[k]));
      scale = std::max(scale, e);
    }
    CHECK(err / scale < 1e-4);
    CHECK(run.max_inflow == 0.0);

    // First-order upwind is only a coarse check.
    GridRunOptions mol;
    mol.t_end = 2.0;
    mol.scheme = GridScheme::MethodOfLines;
    mol.dt_max = 0.5 * g.ds();
    const GridRun coarse = integrate_grid_history(p, xi, m, Law::Cattaneo, g, mol);
    IntegrationOptions io2;
    io2.t_end = coarse.times.back();
    io2.output_stride = coarse.times[1] - coarse.times[0];
    const Trajectory t2 = integrate(p, xi, m, Law::Cattaneo, io2);
    const double e_end = energy(t2.states.back(), xi, m, Law::Cattaneo).total;
    CHECK(std::abs(coarse.energy.back() - e_end) / e_end < 1e-2);
  }
}
