#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "thermobeam/config.hpp"
#include "thermobeam/io.hpp"

namespace thermobeam {

enum class CheckStatus { Pass, Fail, Censored };
std::string to_string(CheckStatus status);

/// One audited invariant. A failing check carries the record that broke it.
struct Check {
  Check() = default;
  Check(std::string name_, std::string invariant_, CheckStatus status_ = CheckStatus::Pass)
      : name(std::move(name_)), invariant(std::move(invariant_)), status(status_) {}

  std::string name;
  std::string invariant;
  CheckStatus status = CheckStatus::Pass;
  nlohmann::json details = nlohmann::json::object();
  nlohmann::json offending;  // null when passing

  nlohmann::json to_json() const;
};

struct ExperimentReport {
  ExperimentKind kind = ExperimentKind::DissipationAudit;
  nlohmann::json header = nlohmann::json::object();
  nlohmann::json results = nlohmann::json::object();
  std::vector<Check> checks;

  /// Deterministic summary: no timings, timestamps or worker counts.
  nlohmann::json summary() const;
  /// 0 when nothing failed, 1 otherwise; CENSORED counts as not failed.
  int exit_code() const;
};

/// Runs the configured experiment, handing artifacts to `writer`.
ExperimentReport execute_experiment(const ExperimentConfig& config, ResultWriter& writer, std::size_t workers);

/// Side-by-side Cattaneo/Fourier norm fits, per-xi rate tables and the tau -> 0 sweep.
ExperimentReport compare_laws(const ExperimentConfig& config, ResultWriter& writer, std::size_t workers);

struct RunOutcome {
  int exit_code = 2;
  std::optional<ExperimentReport> report;
  std::string error;
  std::vector<std::string> files;
};

/// Executes, writes summary.json, plot data and manifest.json into out_dir.
/// Module errors are caught into the manifest with exit code 2.
RunOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::size_t workers = 0);

/// Manifest for a run that failed before a config existed.
void write_error_manifest(const std::filesystem::path& out_dir, const std::string& config_path, const std::string& error);

/// Two-column whitespace files from the CSVs in dir: loglog_norm_k0*.dat, halflife.dat,
/// rho_chi-zero.dat, rho_chi-nonzero.dat and rho.dat. Throws DomainError when dir holds no results.
std::vector<std::string> emit_plot_data(const std::filesystem::path& dir);

/// traj_law-<law>_xi-<value>.csv
std::string trajectory_file_name(Law law, double xi);
std::string trajectory_csv(const Trajectory& traj);

}  // namespace thermobeam
