#include <string>

#include "doctest.h"
#include "thermobeam/config.hpp"
#include "thermobeam/error.hpp"

using namespace thermobeam;

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text, "cfg.json");
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("minimal preset config fills defaults") {
    const ExperimentConfig c = parse_config_text(R"({"experiment": "dissipation-audit", "preset": "regime-zero"})");
    CHECK(c.kind == ExperimentKind::DissipationAudit);
    CHECK(c.law == Law::Cattaneo);
    CHECK(c.resolved_regime() == Regime::ChiZero);
    CHECK(c.params.rho2 == 3.0);
    CHECK(c.xi_values == std::vector<double>{0.1, 1.0, 10.0});
    CHECK(c.time.t_end == 1.0);
    CHECK(c.initial.q_mode == QMode::QuasiStatic);
    CHECK(c.echo()["experiment"] == "dissipation-audit");
  }

  TEST_CASE("kind defaults") {
    const auto pw = parse_config_text(R"({"experiment": "pointwise-decay", "preset": "regime-nonzero"})");
    CHECK(pw.xi_values == std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0, 8.0});
    const auto sob = parse_config_text(R"({"experiment": "sobolev-decay", "preset": "regime-nonzero"})");
    CHECK(sob.time.t_end == 1000.0);
    CHECK(sob.time.output_stride == 1.0);
    const auto over = parse_config_text(
        R"({"experiment": "sobolev-decay", "preset": "regime-nonzero", "time": {"t_end": 50}})");
    CHECK(over.time.t_end == 50.0);
  }

  TEST_CASE("explicit params and kernel") {
    const auto c = parse_config_text(R"({"experiment": "dissipation-audit",
        "params": {"rho1": 1, "rho2": 1, "rho3": 1, "k": 1, "b": 2, "m": 1, "delta": 1, "beta": 1, "tau": 0.5},
        "kernel": [{"g": 0.5, "mu": 1}, {"g": 0.25, "mu": 2}]})");
    CHECK(c.kernel.size() == 2);
    CHECK(c.model().b0() == doctest::Approx(0.625));
  }

  TEST_CASE("kernel mass above b names H3") {
    const std::string text = R"({"experiment": "dissipation-audit",
        "params": {"b": 1, "tau": 1}, "kernel": [{"g": 1.5, "mu": 1}]})";
    try {
      parse_config_text(text);
      FAIL("expected a hypothesis error");
    } catch (const HypothesisError& e) {
      CHECK(e.hypothesis() == "H3");
    }
  }

  TEST_CASE("unknown keys are rejected by name") {
    const std::string m = message_of(R"({"experiment": "dissipation-audit", "preset": "regime-zero",
        "params": {"rho4": 1}})");
    CHECK(contains(m, "unknown key 'params.rho4'"));
    CHECK(contains(message_of(R"({"experiment": "dissipation-audit", "preset": "regime-zero", "colour": 1})"),
                   "unknown key 'colour'"));
  }

  TEST_CASE("syntax errors carry line and column") {
    const std::string m = message_of("{\n  \"experiment\": \"dissipation-audit\",\n  \"preset\" \"regime-zero\"\n}");
    CHECK(contains(m, "cfg.json:3:24: JSON syntax error"));
  }

  TEST_CASE("type errors name the field") {
    CHECK(contains(message_of(R"({"experiment": "dissipation-audit", "preset": "regime-zero",
        "time": {"t_end": "long"}})"), "field 'time.t_end' must be a number"));
    CHECK(contains(message_of(R"({"experiment": "dissipation-audit", "preset": "regime-zero",
        "xi_grid": {"panels": -3}})"), "field 'xi_grid.panels' must be a non-negative integer"));
    CHECK(contains(message_of(R"({"experiment": "dissipation-audit", "preset": "regime-zero",
        "initial_data": {"v": {"type": "triangle"}}})"), "unknown profile type 'triangle'"));
  }

  TEST_CASE("missing pieces") {
    CHECK(contains(message_of(R"({"preset": "regime-zero"})"), "field 'experiment' is required"));
    CHECK(contains(message_of(R"({"experiment": "dissipation-audit"})"), "either 'preset' or 'params'"));
    CHECK(contains(message_of(R"({"experiment": "wave", "preset": "regime-zero"})"), "unknown experiment 'wave'"));
    CHECK_THROWS_AS(parse_config_text(R"({"experiment": "dissipation-audit", "preset": "nope"})"), ConfigError);
    CHECK_THROWS_AS(parse_config("/nonexistent/config.json"), ConfigError);
  }

  TEST_CASE("a heat-flux profile contradicts the Fourier law") {
    const std::string m = message_of(R"({"experiment": "dissipation-audit", "preset": "regime-zero",
        "law": "fourier", "params": {"tau": 0},
        "initial_data": {"q_mode": "profile", "q": {"type": "gaussian"}}})");
    CHECK(contains(m, "initial_data:"));
    CHECK(contains(m, "heat-flux"));
  }

  TEST_CASE("cattaneo needs a positive relaxation time") {
    CHECK(contains(message_of(R"({"experiment": "dissipation-audit", "preset": "regime-zero",
        "params": {"tau": 0}})"), "params.tau must be positive"));
  }

  TEST_CASE("explicit regime must agree with detection") {
    CHECK(contains(message_of(R"({"experiment": "dissipation-audit", "preset": "regime-zero",
        "regime": "chi-nonzero"})"), "disagrees with the stability number"));
    const auto ok =
        parse_config_text(R"({"experiment": "dissipation-audit", "preset": "regime-zero", "regime": "chi-zero"})");
    CHECK(ok.resolved_regime() == Regime::ChiZero);
  }

  TEST_CASE("lyapunov coefficients replay round-trips") {
    const auto c = parse_config_text(R"({"experiment": "lyapunov-audit", "preset": "regime-zero",
        "lyapunov": {"coefficients": {"regime": "chi-zero", "law": "cattaneo", "weights": [2, 4, 8], "N": 64}}})");
    REQUIRE(c.lyapunov.coefficients.has_value());
    CHECK(c.lyapunov.coefficients->weights[1] == 4.0);
    CHECK(c.lyapunov.coefficients->N == 64.0);
    const auto back = coefficients_from_json(coefficients_to_json(*c.lyapunov.coefficients), "x");
    CHECK(back.weights == c.lyapunov.coefficients->weights);
    CHECK(contains(message_of(R"({"experiment": "lyapunov-audit", "preset": "regime-zero",
        "lyapunov": {"coefficients": {"regime": "chi-nonzero", "law": "cattaneo", "weights": [1, 1, 1], "N": 1}}})"),
                   "lyapunov.coefficients.regime"));
    CHECK(contains(message_of(R"({"experiment": "lyapunov-audit", "preset": "regime-zero",
        "lyapunov": {"coefficients": {"regime": "chi-zero", "law": "cattaneo", "weights": [1, 1], "N": 1}}})"),
                   "three numbers"));
  }

  TEST_CASE("echo reparses to the same configuration") {
    const auto c = parse_config_text(R"({"experiment": "regularity-loss", "preset": "regime-nonzero",
        "law": "fourier", "regularity_loss": {"centers": [4, 8]}, "seed": 9})");
    const auto again = config_from_json(c.echo());
    CHECK(again.echo() == c.echo());
    CHECK(again.centers == std::vector<double>{4.0, 8.0});
    CHECK(again.seed == 9);
  }

  TEST_CASE("complex values accept pairs") {
    const auto c = parse_config_text(R"({"experiment": "dissipation-audit", "preset": "regime-zero",
        "initial_data": {"v": {"type": "tabulated", "xi": [0, 1], "values": [[1, 2], 3]}}})");
    const auto& t = std::get<TabulatedProfile>(c.initial[Component::V]);
    CHECK(t.values[0] == cplx(1.0, 2.0));
    CHECK(t.values[1] == cplx(3.0, 0.0));
  }
}
