#include <algorithm>
#include <cmath>
#include <string>

#include "doctest.h"
#include "support.hpp"
#include "thermobeam/decay.hpp"
#include "thermobeam/energy.hpp"

using namespace thermobeam;

namespace {

// Exponential rate fitted to log E on t >= 1 while E / E0 > 1e-250.
double fitted_rate(const Model& m, Law law, double xi, Regime regime) {
  FrequencyState s = FrequencyState::zero(law, m.modes());
  s.v = s.u = s.z = s.y = s.theta = 1.0;
  if (s.q) *s.q = 1.0;
  IntegrationOptions o;
  o.t_end = std::min(10.0 / rho(xi, regime), 1e6);
  o.output_stride = o.t_end / 2000.0;
  const Trajectory tr = integrate(s, xi, m, law, o);
  const double e0 = energy(tr.states.front(), xi, m, law).total;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, n = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double e = energy(tr.states[k], xi, m, law).total / e0;
    if (tr.times[k] < 1.0 || !(e > 1e-250)) continue;
    sx += tr.times[k];
    sy += std::log(e);
    sxx += tr.times[k] * tr.times[k];
    sxy += tr.times[k] * std::log(e);
    n += 1.0;
  }
  return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_SUITE("regime_contrast") {
  TEST_CASE("high-frequency rates scale like the regime envelope") {
    for (const char* name : {"regime-zero", "regime-nonzero"}) {
      const Model m = testing::preset_model(name);
      for (Law law : {Law::Cattaneo, Law::Fourier}) {
        const Regime regime = detect_regime(m.params(), law);
        const double s = regime == Regime::ChiZero ? 2.0 : 4.0;
        std::vector<double> scaled;
        std::string rates;
        for (double xi : {4.0, 8.0, 16.0, 32.0}) {
          const double r = fitted_rate(m, law, xi, regime);
          scaled.push_back(r * std::pow(xi, s));
          rates += " " + std::to_string(xi) + ":" + std::to_string(r);
        }
        const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
        INFO(std::string(name), " ", to_string(law), " ", to_string(regime), " xi:rate", rates, " spread ", *hi / *lo);
        CHECK(*lo > 0.0);
        CHECK(*hi / *lo <= 4.0);
      }
    }
  }
}

TEST_SUITE("halflife_monotone") {
  TEST_CASE("band half-lives grow with the band center") {
    for (const char* name : {"regime-zero", "regime-nonzero"}) {
      const Model m = testing::preset_model(name);
      for (Law law : {Law::Cattaneo, Law::Fourier}) {
        const RegularityLoss r = regularity_loss_experiment(m, law, {4.0, 8.0, 16.0, 32.0}, BandOptions{}, 1);
        std::string rows;
        for (const auto& row : r.rows) rows += " " + std::to_string(row.center) + ":" + std::to_string(row.half_life);
        INFO(std::string(name), " ", to_string(law), " center:half-life", rows);
        CHECK(r.monotone);
      }
    }
  }
}
