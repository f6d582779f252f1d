#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "thermobeam/decay.hpp"
#include "thermobeam/dynamics.hpp"
#include "thermobeam/initial_data.hpp"
#include "thermobeam/lyapunov.hpp"
#include "thermobeam/model.hpp"

namespace thermobeam {

enum class ExperimentKind {
  PointwiseDecay,
  SobolevDecay,
  RegularityLoss,
  DissipationAudit,
  LyapunovAudit,
  CompareLaws,
  ChiSweep,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

/// Pass/fail limits; defaults match the acceptance targets.
struct Thresholds {
  double dissipation_relative = 1e-6;
  double cauchy_schwarz = 1e-10;
  double pointwise_c_max = 100.0;
  double slope_chi_zero = 2.0;
  double slope_chi_nonzero = 4.0;
  double slope_tolerance = 0.5;
  double bound_growth = 1.05;
  double reduction = 1e-2;
  double sobolev_exponent_max = -0.10;
};

struct SobolevSettings {
  int k_max = 2;
  int l = 2;
  double t_cal = 10.0;
  double t_hi = 1000.0;
  double fit_lo = 10.0;
  double fit_hi = 1000.0;
};

struct PointwiseSettings {
  double t_factor = 10.0;  // t_end = min(t_factor / rho, t_cap)
  double t_cap = 2e4;
  std::size_t outputs = 2000;
  double fit_from = 1.0;
  bool write_trajectories = true;
};

struct ReductionSettings {
  std::vector<double> tau{1e-2, 1e-3, 1e-4};
  double xi = 1.0;
  double t_end = 20.0;
  double output_stride = 0.01;
};

struct LyapunovSettings {
  std::size_t samples_per_xi = 1000;
  std::vector<double> calibration_xi{0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 3.5, 5.0, 7.5, 10.0};
  std::vector<double> equivalence_xi{0.1, 1.0, 10.0};
  std::size_t equivalence_samples = 10000;
  std::size_t trajectories = 100;
  double t_end = 20.0;
  double output_stride = 0.05;
  /// Replayed instead of calibrating when present.
  std::optional<LyapunovCoefficients> coefficients;
};

struct ChiSweepSettings {
  std::vector<double> rho2{1.0, 2.0, 3.0};
  double center = 16.0;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::DissipationAudit;
  std::string preset;
  PhysicalParams params;
  MemoryKernel kernel;
  Law law = Law::Cattaneo;
  std::optional<Regime> regime;  // empty: detect from the stability number
  InitialDataSpec initial;
  double xi_max = 64.0;
  std::size_t panels = 4096;
  IntegrationOptions time;
  std::vector<double> xi_values;
  SobolevSettings sobolev;
  PointwiseSettings pointwise;
  BandOptions band;
  std::vector<double> centers{4.0, 8.0, 16.0, 32.0};
  ChiSweepSettings chi_sweep;
  ReductionSettings reduction;
  LyapunovSettings lyapunov;
  Thresholds thresholds;
  std::string output_dir = "results";
  std::uint64_t seed = 1;
  std::size_t workers = 0;

  Model model() const { return Model(params, kernel); }
  Regime resolved_regime() const;
  /// Effective configuration with every default filled in.
  nlohmann::json echo() const;
};

/// Throws ConfigError (with line and column for syntax errors, or the offending
/// field), HypothesisError naming H1/H2/H3, or InvalidParameters.
ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig config_from_json(const nlohmann::json& j);

nlohmann::json profile_to_json(const Profile& profile);
nlohmann::json coefficients_to_json(const LyapunovCoefficients& c);
LyapunovCoefficients coefficients_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace thermobeam
