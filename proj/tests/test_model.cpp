#include <random>

#include "doctest.h"
#include "support.hpp"
#include "thermobeam/error.hpp"
#include "thermobeam/model.hpp"

using namespace thermobeam;

TEST_SUITE("model") {
  TEST_CASE("chi0 examples") {
    PhysicalParams p;
    CHECK(compute_chi0(p) == doctest::Approx(0.0));
    p.rho2 = 3.0;
    CHECK(compute_chi0(p) == doctest::Approx(2.0));
    p = PhysicalParams{};
    p.b = 2.0;
    p.k = 4.0;
    CHECK(compute_chi0(p) == doctest::Approx(0.5));
  }

  TEST_CASE("chi0tau examples") {
    PhysicalParams p;
    p.rho2 = 3.0;
    p.tau = 2.0;
    CHECK(compute_chi0tau(p) == doctest::Approx(0.0));
    p = PhysicalParams{};
    p.tau = 1.0;
    CHECK(compute_chi0tau(p) == doctest::Approx(-1.0));
    p = PhysicalParams{};
    p.tau = 0.0;
    p.b = 2.0;
    p.rho2 = 2.0;
    CHECK(compute_chi0tau(p) == doctest::Approx(0.0));
  }

  TEST_CASE("chi0tau at tau=0 is a multiple of chi0") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(0.2, 5.0);
    for (int i = 0; i < 100; ++i) {
      PhysicalParams p{d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), 0.0};
      const double expect = -(p.rho1 / (p.rho3 * p.k)) * compute_chi0(p);
      CHECK(std::abs(compute_chi0tau(p) - expect) <= 1e-13 * std::max(1.0, std::abs(expect)));
    }
  }

  TEST_CASE("solve rho2 for chi0tau = 0") {
    PhysicalParams p;
    p.tau = 2.0;
    CHECK(solve_rho2_for_chi0tau_zero(p) == doctest::Approx(3.0));
    p.tau = 1.0;
    CHECK_THROWS_AS(solve_rho2_for_chi0tau_zero(p), DegenerateDivisor);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(0.2, 5.0);
    int done = 0;
    while (done < 100) {
      PhysicalParams q{d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
      if (std::abs(q.tau - q.rho1 / (q.rho3 * q.k)) < 0.1) continue;
      q.rho2 = solve_rho2_for_chi0tau_zero(q);
      CHECK(std::abs(compute_chi0tau(q)) < 1e-12);
      ++done;
    }
  }

  TEST_CASE("kernel hypotheses report") {
    PhysicalParams p;
    auto r = verify_kernel_hypotheses(MemoryKernel{{{0.5, 1.0}}}, p);
    CHECK(r.b0 == doctest::Approx(0.5));
    CHECK(r.a == doctest::Approx(0.5));
    CHECK(*r.k1 == 1.0);
    CHECK(*r.k2 == 1.0);
    CHECK((r.h1 && r.h2 && r.h3));

    r = verify_kernel_hypotheses(MemoryKernel{{{1.0, 1.0}, {1.0, 2.0}}}, p);
    CHECK(r.b0 == doctest::Approx(1.5));
    CHECK_FALSE(r.h3);
    CHECK(*r.k1 >= *r.k2);
    CHECK(*r.k2 > 0.0);

    r = verify_kernel_hypotheses(MemoryKernel{}, p);
    CHECK(r.b0 == 0.0);
    CHECK(r.h3);
    CHECK_FALSE(r.k1.has_value());
  }

  TEST_CASE("model construction names the violated hypothesis") {
    PhysicalParams p;
    try {
      Model m(p, MemoryKernel{{{1.0, 1.0}, {1.0, 2.0}}});
      FAIL("expected HypothesisError");
    } catch (const HypothesisError& e) {
      CHECK(e.hypothesis() == "H3");
    }
    try {
      Model m(p, MemoryKernel{{{-1.0, 1.0}}});
      FAIL("expected HypothesisError");
    } catch (const HypothesisError& e) {
      CHECK(e.hypothesis() == "H1");
    }
    try {
      Model m(p, MemoryKernel{{{0.1, 0.0}}});
      FAIL("expected HypothesisError");
    } catch (const HypothesisError& e) {
      CHECK(e.hypothesis() == "H2");
    }
    p.rho1 = 0.0;
    CHECK_THROWS_AS(Model(p, testing::half_kernel()), InvalidParameters);
    p = PhysicalParams{};
    p.tau = -1.0;
    CHECK_THROWS_AS(Model(p, testing::half_kernel()), InvalidParameters);
  }

  TEST_CASE("kernel evaluation") {
    const MemoryKernel k{{{1.0, 1.0}, {2.0, 3.0}}};
    CHECK(k(0.0) == doctest::Approx(3.0));
    CHECK(k(1.0) == doctest::Approx(std::exp(-1.0) + 2.0 * std::exp(-3.0)));
    CHECK(k.mass() == doctest::Approx(1.0 + 2.0 / 3.0));
    CHECK(k.max_rate() == 3.0);
    CHECK(k.min_rate() == 1.0);
  }

  TEST_CASE("regime detection and presets") {
    const auto& zero = preset("regime-zero");
    const auto& nonzero = preset("regime-nonzero");
    CHECK(zero.params.rho2 == 3.0);
    CHECK(nonzero.params.rho2 == 1.0);
    CHECK(zero.params.tau == 2.0);
    CHECK(detect_regime(zero.params, Law::Cattaneo) == Regime::ChiZero);
    CHECK(detect_regime(nonzero.params, Law::Cattaneo) == Regime::ChiNonzero);
    CHECK(detect_regime(zero.params, Law::Fourier) == Regime::ChiNonzero);
    CHECK(detect_regime(nonzero.params, Law::Fourier) == Regime::ChiZero);

    PhysicalParams p = zero.params;
    p.rho2 = 3.0 + 5e-11;
    CHECK(detect_regime(p, Law::Cattaneo) == Regime::ChiZero);
    p.rho2 = 3.0 + 1e-9;
    CHECK(detect_regime(p, Law::Cattaneo) == Regime::ChiNonzero);
    CHECK_THROWS_AS(preset("regime-other"), ConfigError);
  }

  TEST_CASE("name conversions") {
    CHECK(law_from_string(to_string(Law::Fourier)) == Law::Fourier);
    CHECK(regime_from_string(to_string(Regime::ChiNonzero)) == Regime::ChiNonzero);
    CHECK_THROWS_AS(law_from_string("maxwell"), ConfigError);
    CHECK_THROWS_AS(regime_from_string("chi"), ConfigError);
  }

  TEST_CASE("model copies") {
    const Model m = testing::unit_model(1.0);
    CHECK(m.with_tau(0.5).params().tau == 0.5);
    CHECK(m.with_rho2(4.0).params().rho2 == 4.0);
    CHECK(m.b0() == doctest::Approx(0.5));
    CHECK(m.a() == doctest::Approx(0.5));
  }
}
