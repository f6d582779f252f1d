#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "thermobeam/config.hpp"
#include "thermobeam/error.hpp"
#include "thermobeam/experiments.hpp"
#include "thermobeam/model.hpp"

using namespace thermobeam;

namespace {

int cmd_run(const std::string& path, const std::optional<std::string>& out, const std::optional<std::uint64_t>& seed,
            const std::optional<std::size_t>& workers) {
  ExperimentConfig config;
  try {
    config = parse_config(path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    try {
      write_error_manifest(out ? *out : "results", path, e.what());
    } catch (const std::exception&) {
    }
    return 2;
  }
  if (out) config.output_dir = *out;
  if (seed) config.seed = *seed;
  std::size_t requested = config.workers;
  if (workers) requested = *workers;

  const RunOutcome r = run_experiment(config, config.output_dir, requested);
  if (r.report) {
    for (const auto& c : r.report->checks) std::cout << to_string(c.status) << "  " << c.name << "\n";
  }
  if (!r.error.empty()) std::cerr << "error: " << r.error << "\n";
  std::cout << "results in " << config.output_dir << " (exit " << r.exit_code << ")\n";
  return r.exit_code;
}

int cmd_presets() {
  for (const auto& p : presets()) {
    const auto n = stability_numbers(p.params);
    std::cout << p.name << "\n";
    std::cout << "  rho1=" << p.params.rho1 << " rho2=" << p.params.rho2 << " rho3=" << p.params.rho3
              << " k=" << p.params.k << " b=" << p.params.b << " m=" << p.params.m << " delta=" << p.params.delta
              << " beta=" << p.params.beta << " tau=" << p.params.tau << "\n";
    std::cout << "  kernel:";
    for (const auto& m : p.kernel.modes) std::cout << " (g=" << m.g << ", mu=" << m.mu << ")";
    std::cout << "\n  chi0=" << n.chi0 << " chi0tau=" << n.chi0tau
              << " regime(cattaneo)=" << to_string(detect_regime(p.params, Law::Cattaneo))
              << " regime(fourier)=" << to_string(detect_regime(p.params, Law::Fourier)) << "\n";
  }
  return 0;
}

int cmd_check(const std::string& path) {
  try {
    const ExperimentConfig config = parse_config(path);
    std::cout << config.echo().dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_plot(const std::string& dir) {
  try {
    for (const auto& f : emit_plot_data(dir)) std::cout << f << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"thermobeam: spectral decay experiments for the thermoelastic Timoshenko beam with memory"};
  app.require_subcommand(1);

  std::string run_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  auto* run = app.add_subcommand("run", "run the experiment described by a JSON config");
  run->add_option("config", run_path, "config file")->required();
  run->add_option("--out", out, "output directory (overrides output_dir)");
  run->add_option("--seed", seed, "random seed (overrides seed)");
  run->add_option("--workers", workers, "worker threads (fallback: THERMOBEAM_WORKERS)");

  auto* list = app.add_subcommand("presets", "list the built-in parameter presets");

  std::string check_path;
  auto* check = app.add_subcommand("check", "validate a config and print it with defaults filled in");
  check->add_option("config", check_path, "config file")->required();

  std::string plot_dir;
  auto* plot = app.add_subcommand("plot", "regenerate plot data files in a results directory");
  plot->add_option("dir", plot_dir, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(run_path, out, seed, workers);
    if (*list) return cmd_presets();
    if (*check) return cmd_check(check_path);
    if (*plot) return cmd_plot(plot_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
