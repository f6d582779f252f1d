#include <random>

#include "doctest.h"
#include "support.hpp"
#include "thermobeam/error.hpp"
#include "thermobeam/state.hpp"

using namespace thermobeam;

TEST_SUITE("state") {
  TEST_CASE("shape checks") {
    FrequencyState c = FrequencyState::zero(Law::Cattaneo, 2);
    CHECK(c.has_q());
    CHECK(c.w.size() == 2);
    CHECK(c.p.size() == 2);
    CHECK_NOTHROW(check_shape(c, Law::Cattaneo, 2));
    CHECK_THROWS_AS(check_shape(c, Law::Fourier, 2), ShapeError);
    CHECK_THROWS_AS(check_shape(c, Law::Cattaneo, 1), ShapeError);
    FrequencyState f = FrequencyState::zero(Law::Fourier, 1);
    CHECK_THROWS_AS(check_shape(f, Law::Cattaneo, 1), LawMismatch);
  }

  TEST_CASE("invariant enforcement") {
    FrequencyState s = FrequencyState::zero(Law::Fourier, 1);
    s.p[0] = -5e-13;
    enforce_invariants(s, 0.5);
    CHECK(s.p[0] == 0.0);
    s.p[0] = -1e-9;
    CHECK_THROWS_AS(enforce_invariants(s, 0.5), InvariantViolation);
    s.p[0] = 1.0;
    s.w[0] = 1.0;  // |w|^2 = 1 > b0 p = 0.5
    CHECK(s.cauchy_schwarz_excess(0.5) == doctest::Approx(0.5));
    CHECK_THROWS_AS(enforce_invariants(s, 0.5), InvariantViolation);
    s.w[0] = 0.5;
    CHECK_NOTHROW(enforce_invariants(s, 0.5));
  }

  TEST_CASE("linear part round trip") {
    std::mt19937_64 rng(3);
    for (Law law : {Law::Cattaneo, Law::Fourier}) {
      FrequencyState s = testing::random_point_state(rng, law, 2);
      s.w = {testing::random_cplx(rng), testing::random_cplx(rng)};
      s.p = {3.0, 4.0};
      const StateLayout layout = StateLayout::of(law, 2);
      const auto x = linear_part(s);
      CHECK(x.size() == layout.size());
      const FrequencyState r = from_linear(x, layout, s.p);
      CHECK(testing::max_abs_diff(r, s) == 0.0);
      CHECK_THROWS_AS(from_linear(x, layout, {1.0}), ShapeError);
    }
  }

  TEST_CASE("arithmetic and conjugation") {
    std::mt19937_64 rng(5);
    const FrequencyState a = testing::random_point_state(rng, Law::Cattaneo, 1);
    const FrequencyState b = testing::random_point_state(rng, Law::Cattaneo, 1);
    const FrequencyState c = a + 2.0 * b;
    CHECK(std::abs(c.u - (a.u + 2.0 * b.u)) < 1e-15);
    CHECK(std::abs(*c.q - (*a.q + 2.0 * *b.q)) < 1e-15);
    const FrequencyState ac = a.conj();
    CHECK(ac.theta == std::conj(a.theta));
    CHECK(FrequencyState::zero(Law::Fourier, 3).is_zero());
    CHECK_FALSE(a.is_zero());
    FrequencyState n = a;
    n.v = cplx(std::nan(""), 0.0);
    CHECK_FALSE(n.is_finite());
  }
}
