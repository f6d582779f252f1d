#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "thermobeam/decay.hpp"
#include "thermobeam/error.hpp"

using namespace thermobeam;

namespace {

InitialDataSpec gaussian_data() {
  InitialDataSpec spec;
  for (std::size_t i = 0; i < kComponents - 1; ++i) spec.components[i] = GaussianProfile{1.0, 1.0};
  spec.q_mode = QMode::QuasiStatic;
  return spec;
}

IntegrationOptions short_run(double t_end = 10.0) {
  IntegrationOptions o;
  o.t_end = t_end;
  o.output_stride = 1.0;
  o.dt_max = 0.05;
  return o;
}

Trajectory constant_trajectory(double xi, double v, std::size_t n_t) {
  Trajectory tr;
  tr.xi = xi;
  FrequencyState s = FrequencyState::zero(Law::Fourier, 0);
  s.v = v;
  for (std::size_t k = 0; k < n_t; ++k) {
    tr.times.push_back(static_cast<double>(k));
    tr.states.push_back(s);
  }
  return tr;
}

}  // namespace

TEST_SUITE("decay") {
  TEST_CASE("simpson grid") {
    const XiGrid g = XiGrid::simpson(0.0, 2.0, 4);
    CHECK(g.size() == 9);
    CHECK(g.nodes.back() == 2.0);
    CHECK(g.weight_sum() == doctest::Approx(4.0));
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::pow(g.nodes[i], 3);
    CHECK(s == doctest::Approx(8.0));
    CHECK_THROWS_AS(XiGrid::simpson(1.0, 1.0, 4), InvalidParameters);
    CHECK_THROWS_AS(XiGrid::simpson(0.0, 1.0, 0), InvalidParameters);
  }

  TEST_CASE("state norm examples") {
    FrequencyState s = FrequencyState::zero(Law::Cattaneo, 1);
    s.v = cplx(3.0, 4.0);
    CHECK(state_norm_sq(s, 2.0) == doctest::Approx(25.0));
    s.q = 1.0;
    s.p[0] = 0.5;
    CHECK(state_norm_sq(s, 2.0) == doctest::Approx(28.0));
  }

  TEST_CASE("plancherel sums of synthetic trajectories") {
    const XiGrid g = XiGrid::simpson(0.0, 1.0, 8);
    std::vector<Trajectory> trs;
    for (double xi : g.nodes) trs.push_back(constant_trajectory(xi, 1.0, 3));
    const auto k0 = plancherel_norm_sq(g, trs, 0);
    const auto k1 = plancherel_norm_sq(g, trs, 1);
    REQUIRE(k0.size() == 3);
    CHECK(k0[2] == doctest::Approx(2.0));
    CHECK(k1[0] == doctest::Approx(2.0 / 3.0));

    trs.pop_back();
    CHECK_THROWS_AS(plancherel_norm_sq(g, trs, 0), GridMismatch);
    trs.push_back(constant_trajectory(5.0, 1.0, 3));
    CHECK_THROWS_AS(plancherel_norm_sq(g, trs, 0), GridMismatch);
  }

  TEST_CASE("decay fit") {
    std::vector<double> t, a, b;
    for (int i = 0; i <= 100; ++i) {
      t.push_back(i * 10.0);
      a.push_back(3.0 * std::pow(1.0 + t.back(), -0.125));
      b.push_back(std::pow(1.0 + t.back(), -0.5));
    }
    const DecayFit fa = fit_decay_rate(t, a, 10.0, 1000.0);
    CHECK(fa.exponent == doctest::Approx(-0.125).epsilon(1e-12));
    CHECK(std::exp(fa.log_constant) == doctest::Approx(3.0));
    CHECK(fa.residual < 1e-12);
    CHECK(fa.samples == 100);
    CHECK(fit_decay_rate(t, b, 0.0, 1000.0).exponent == doctest::Approx(-0.5));
    std::vector<double> bad = b;
    bad[50] = 0.0;
    CHECK_THROWS_AS(fit_decay_rate(t, bad, 10.0, 1000.0), DomainError);
    CHECK_THROWS_AS(fit_decay_rate(t, b, 2000.0, 3000.0), DomainError);
    CHECK_THROWS_AS(fit_decay_rate({0.0, 1.0}, {1.0}, 0.0, 1.0), GridMismatch);
  }

  TEST_CASE("theorem bound bookkeeping") {
    SobolevNorms zero;
    zero.times = {0.0, 10.0, 100.0, 1000.0};
    zero.norms.assign(1, std::vector<double>(4, 0.0));
    const TheoremBoundCheck z = verify_theorem_bound(zero, 0, 2, 0.0, 0.0, Regime::ChiZero);
    CHECK(z.pass);
    CHECK(z.growth == 0.0);
    CHECK_THROWS_AS(verify_theorem_bound(zero, 1, 2, 0.0, 0.0, Regime::ChiZero), DomainError);

    SobolevNorms exact = zero;
    for (std::size_t i = 0; i < 4; ++i) {
      exact.norms[0][i] = 2.0 * theorem_bound_shape(exact.times[i], 0, 2, 1.0, 1.0, Regime::ChiNonzero);
    }
    const TheoremBoundCheck e = verify_theorem_bound(exact, 0, 2, 1.0, 1.0, Regime::ChiNonzero);
    CHECK(e.pass);
    CHECK(e.c_cal == doctest::Approx(2.0));
    CHECK(e.growth == doctest::Approx(1.0));

    CHECK(theorem_bound_shape(0.0, 1, 2, 1.0, 1.0, Regime::ChiZero) == doctest::Approx(2.0));
    CHECK(theorem_bound_shape(3.0, 0, 2, 0.0, 1.0, Regime::ChiZero) == doctest::Approx(0.25));
    CHECK(theorem_bound_shape(15.0, 0, 2, 0.0, 1.0, Regime::ChiNonzero) == doctest::Approx(0.25));
  }

  TEST_CASE("plancherel norm at t = 0 matches the closed form") {
    const InitialDataSpec spec = gaussian_data();
    for (Law law : {Law::Cattaneo, Law::Fourier}) {
      const Model m = testing::preset_model("regime-zero");
      const SobolevNorms n = sobolev_norms(m, law, spec, XiGrid::simpson(0.0, 16.0, 512), short_run(2.0), 2, 1);
      const InitialNorms closed = initial_norms(spec, m, law, 2);
      for (int k = 0; k <= 2; ++k) {
        CHECK(n.norms[k][0] == doctest::Approx(closed.l2[k]).epsilon(1e-6));
      }
      CHECK(n.max_cs_excess <= 1e-10);
    }
  }

  TEST_CASE("norm quadrature converges under panel doubling") {
    const Model m = testing::preset_model("regime-nonzero");
    const InitialDataSpec spec = gaussian_data();
    const SobolevNorms a = sobolev_norms(m, Law::Cattaneo, spec, XiGrid::simpson(0.0, 16.0, 256), short_run(), 0, 1);
    const SobolevNorms b = sobolev_norms(m, Law::Cattaneo, spec, XiGrid::simpson(0.0, 16.0, 512), short_run(), 0, 1);
    for (std::size_t i : {0u, 1u, 10u}) {
      CHECK(std::abs(a.norms[0][i] - b.norms[0][i]) < 1e-6 * b.norms[0][i]);
    }
  }

  TEST_CASE("truncating the wavenumber domain is negligible for gaussian data") {
    const Model m = testing::preset_model("regime-zero");
    const InitialDataSpec spec = gaussian_data();
    const SobolevNorms a = sobolev_norms(m, Law::Fourier, spec, XiGrid::simpson(0.0, 16.0, 512), short_run(), 1, 1);
    const SobolevNorms b = sobolev_norms(m, Law::Fourier, spec, XiGrid::simpson(0.0, 32.0, 1024), short_run(), 1, 1);
    for (std::size_t i = 0; i < a.times.size(); ++i) {
      CHECK(std::abs(a.norms[1][i] - b.norms[1][i]) < 1e-8);
    }
  }

  TEST_CASE("worker count does not change the norms") {
    const Model m = testing::preset_model("regime-zero");
    const InitialDataSpec spec = gaussian_data();
    const XiGrid g = XiGrid::simpson(0.0, 8.0, 64);
    const SobolevNorms a = sobolev_norms(m, Law::Cattaneo, spec, g, short_run(), 1, 1);
    const SobolevNorms b = sobolev_norms(m, Law::Cattaneo, spec, g, short_run(), 1, 3);
    CHECK(a.norms == b.norms);
  }

  TEST_CASE("bound ratio stays finite in every regime and law") {
    const InitialDataSpec spec = gaussian_data();
    for (const char* name : {"regime-zero", "regime-nonzero"}) {
      const Model m = testing::preset_model(name);
      for (Law law : {Law::Cattaneo, Law::Fourier}) {
        const SobolevNorms n = sobolev_norms(m, law, spec, XiGrid::simpson(0.0, 16.0, 256), short_run(20.0), 0, 1);
        const InitialNorms closed = initial_norms(spec, m, law, 2);
        const TheoremBoundCheck c =
            verify_theorem_bound(n, 0, 2, closed.l1, closed.l2[2], detect_regime(m.params(), law), 1.0, 20.0, 10.0);
        CHECK(std::isfinite(c.c_fit));
        CHECK(c.c_cal > 0.0);
      }
    }
  }

  TEST_CASE("band half-life") {
    const Model m = testing::preset_model("regime-zero");
    BandOptions opts;
    CHECK_THROWS_AS(regularity_loss_experiment(m, Law::Cattaneo, {1.2}, opts, 1), DomainError);

    const HalfLife h = band_half_life(m, Law::Cattaneo, 4.0, opts);
    CHECK_FALSE(h.censored);
    CHECK(h.e0 > 0.0);
    CHECK(band_energy(m, Law::Cattaneo, 4.0, h.half_life, opts) <= 0.5 * h.e0);
    CHECK(band_energy(m, Law::Cattaneo, 4.0, h.half_life * (1.0 - 1e-3), opts) > 0.5 * h.e0);

    BandOptions tight = opts;
    tight.t_budget = h.half_life / 4.0;
    const HalfLife c = band_half_life(m, Law::Cattaneo, 4.0, tight);
    CHECK(c.censored);
    CHECK(c.half_life == tight.t_budget);

    BandOptions empty = opts;
    empty.amplitude = 0.0;
    CHECK_THROWS_AS(band_half_life(m, Law::Cattaneo, 4.0, empty), DomainError);
  }

  TEST_CASE("regularity loss rows are sorted and the slope uses uncensored rows") {
    const Model m = testing::preset_model("regime-nonzero");
    const RegularityLoss r = regularity_loss_experiment(m, Law::Fourier, {8.0, 4.0}, BandOptions{}, 1);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].center == 4.0);
    CHECK(r.slope_valid);
    const double expected = std::log(r.rows[1].half_life / r.rows[0].half_life) / std::log(2.0);
    CHECK(r.slope == doctest::Approx(expected));
  }
}
