#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "thermobeam/config.hpp"
#include "thermobeam/error.hpp"
#include "thermobeam/experiments.hpp"
#include "thermobeam/io.hpp"
#include "thermobeam/parallel.hpp"

using namespace thermobeam;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "thermobeam_unit" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_dat(const fs::path& p) {
  std::vector<std::vector<double>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> r;
    double v;
    while (ls >> v) r.push_back(v);
    rows.push_back(r);
  }
  return rows;
}

const Check* find_check(const ExperimentReport& r, const std::string& prefix) {
  for (const auto& c : r.checks)
    if (c.name.rfind(prefix, 0) == 0) return &c;
  return nullptr;
}

ExperimentConfig small_sobolev(const char* preset, const char* law) {
  return config_from_json({{"experiment", "sobolev-decay"},
                           {"preset", preset},
                           {"law", law},
                           {"xi_grid", {{"xi_max", 12.0}, {"panels", 128}}},
                           {"time", {{"t_end", 100.0}, {"output_stride", 1.0}, {"dt_max", 0.05}}},
                           {"sobolev", {{"t_cal", 10.0}, {"t_hi", 100.0}, {"fit_lo", 10.0}, {"fit_hi", 100.0}}}});
}

}  // namespace

TEST_SUITE("experiments") {
  TEST_CASE("dissipation audit passes and writes residuals") {
    const auto c = config_from_json({{"experiment", "dissipation-audit"}, {"preset", "regime-zero"}});
    const fs::path dir = fresh_dir("dissipation");
    const RunOutcome out = run_experiment(c, dir, 1);
    CHECK(out.exit_code == 0);
    REQUIRE(out.report.has_value());
    CHECK(out.report->checks.size() >= 3);
    for (const auto& ch : out.report->checks) CHECK(ch.offending.is_null());
    const CsvData csv = read_csv(dir / "dissipation_residuals.csv");
    CHECK_NOTHROW(csv.column("residual"));
    CHECK_NOTHROW(csv.column("fd3_rate"));
    CHECK(csv.rows.size() > 100);
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "summary.json"));
  }

  TEST_CASE("tightened threshold fails with an offending record") {
    const auto c = config_from_json({{"experiment", "dissipation-audit"},
                                     {"preset", "regime-nonzero"},
                                     {"xi_values", {1.0}},
                                     {"thresholds", {{"dissipation_relative", 1e-30}}}});
    const RunOutcome out = run_experiment(c, fresh_dir("dissipation_fail"), 1);
    CHECK(out.exit_code == 1);
    const Check* ch = find_check(*out.report, "dissipation-identity");
    REQUIRE(ch != nullptr);
    CHECK(ch->status == CheckStatus::Fail);
    CHECK_FALSE(ch->offending.is_null());
    CHECK(out.report->summary()["status"] == "FAIL");
  }

  TEST_CASE("summaries are byte-identical across reruns and worker counts") {
    const auto c = small_sobolev("regime-zero", "cattaneo");
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    CHECK(run_experiment(c, a, 1).exit_code == 0);
    CHECK(run_experiment(c, b, 3).exit_code == 0);
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
    CHECK(slurp(a / "norms.csv") == slurp(b / "norms.csv"));
    const json manifest = json::parse(slurp(b / "manifest.json"));
    CHECK(manifest["workers"] == 3);
    CHECK(manifest["exit_code"] == 0);
    CHECK(manifest.contains("started_at"));
  }

  TEST_CASE("norm plot data is monotone in time") {
    const fs::path dir = fresh_dir("plot_norms");
    run_experiment(small_sobolev("regime-nonzero", "fourier"), dir, 1);
    const auto rows = read_dat(dir / "loglog_norm_k0.dat");
    REQUIRE(rows.size() == 101);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][0] > rows[i - 1][0]);
    CHECK(rows.back()[1] < rows.front()[1]);

    const auto zero = read_dat(dir / "rho_chi-zero.dat");
    const auto nonzero = read_dat(dir / "rho_chi-nonzero.dat");
    REQUIRE(zero.size() == 401);
    CHECK(zero[20][0] == doctest::Approx(1.0));
    CHECK(zero[20][1] == doctest::Approx(0.125));
    CHECK(nonzero[20][1] == doctest::Approx(0.0625));
    CHECK(fs::exists(dir / "rho.dat"));
  }

  TEST_CASE("plot data from an empty directory is an error") {
    const fs::path dir = fresh_dir("plot_empty");
    fs::create_directories(dir);
    CHECK_THROWS_AS(emit_plot_data(dir), DomainError);
  }

  TEST_CASE("regularity loss rows and censoring") {
    const auto c = config_from_json({{"experiment", "regularity-loss"},
                                     {"preset", "regime-zero"},
                                     {"regularity_loss", {{"centers", {4.0, 8.0}}}}});
    const fs::path dir = fresh_dir("regularity");
    const RunOutcome out = run_experiment(c, dir, 1);
    CHECK(out.exit_code <= 1);
    CHECK(read_csv(dir / "halflife.csv").rows.size() == 2);
    CHECK(read_dat(dir / "halflife.dat").size() == 2);

    const auto censored = config_from_json({{"experiment", "regularity-loss"},
                                            {"preset", "regime-zero"},
                                            {"regularity_loss", {{"centers", {4.0, 8.0}}, {"t_budget", 1e-3}}}});
    const RunOutcome cen = run_experiment(censored, fresh_dir("censored"), 1);
    const Check* ch = find_check(*cen.report, "half-life-slope");
    REQUIRE(ch != nullptr);
    CHECK(ch->status == CheckStatus::Censored);
    CHECK(cen.exit_code == 0);
  }

  TEST_CASE("module errors land in the manifest with exit code 2") {
    const auto c = config_from_json({{"experiment", "regularity-loss"},
                                     {"preset", "regime-zero"},
                                     {"regularity_loss", {{"centers", {1.2}}}}});
    const fs::path dir = fresh_dir("error_path");
    const RunOutcome out = run_experiment(c, dir, 1);
    CHECK(out.exit_code == 2);
    CHECK_FALSE(out.error.empty());
    const json manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["exit_code"] == 2);
    CHECK(manifest["error"].get<std::string>().find("xi = 1") != std::string::npos);

    const fs::path early = fresh_dir("error_manifest");
    write_error_manifest(early, "bad.json", "boom");
    const json m2 = json::parse(slurp(early / "manifest.json"));
    CHECK(m2["exit_code"] == 2);
    CHECK(m2["config_path"] == "bad.json");
  }

  TEST_CASE("chi sweep writes one row per rho2") {
    const auto c = config_from_json({{"experiment", "chi-sweep"},
                                     {"preset", "regime-zero"},
                                     {"chi_sweep", {{"rho2", {1.0, 2.0, 3.0}}, {"center", 4.0}}}});
    const fs::path dir = fresh_dir("chi_sweep");
    const RunOutcome out = run_experiment(c, dir, 1);
    CHECK(out.exit_code == 0);
    const CsvData csv = read_csv(dir / "chi_sweep.csv");
    REQUIRE(csv.rows.size() == 3);
    CHECK(csv.rows[2][csv.column("regime")] == "chi-zero");
    CHECK(csv.rows[0][csv.column("regime")] == "chi-nonzero");
  }

  TEST_CASE("compare-laws with zero data is trivially satisfied") {
    json zero = {{"type", "zero"}};
    const auto c = config_from_json({{"experiment", "compare-laws"},
                                     {"preset", "regime-zero"},
                                     {"initial_data", {{"v", zero}, {"u", zero}, {"z", zero}, {"y", zero}, {"theta", zero}}},
                                     {"xi_grid", {{"xi_max", 8.0}, {"panels", 16}}},
                                     {"xi_values", {1.0}},
                                     {"time", {{"t_end", 20.0}, {"output_stride", 1.0}}},
                                     {"sobolev", {{"t_cal", 10.0}, {"t_hi", 20.0}, {"fit_lo", 10.0}, {"fit_hi", 20.0}}},
                                     {"reduction", {{"t_end", 5.0}}}});
    ResultWriter writer(fresh_dir("compare_zero"));
    const ExperimentReport r = compare_laws(c, writer, 1);
    CHECK(r.exit_code() == 0);
    const Check* cat = find_check(r, "theorem-bound[k=0]_law-cattaneo");
    const Check* fou = find_check(r, "theorem-bound[k=0]_law-fourier");
    REQUIRE(cat != nullptr);
    REQUIRE(fou != nullptr);
    CHECK(cat->status == CheckStatus::Pass);
    CHECK(fou->status == CheckStatus::Pass);
    CHECK(cat->details == fou->details);
    const Check* red = find_check(r, "tau-reduction");
    REQUIRE(red != nullptr);
    CHECK(red->status == CheckStatus::Pass);
  }

  TEST_CASE("trajectory file names and contents") {
    CHECK(trajectory_file_name(Law::Fourier, 0.5) == "traj_law-fourier_xi-0.5.csv");
    Trajectory tr;
    tr.xi = 1.0;
    tr.law = Law::Fourier;
    tr.times = {0.0};
    tr.states = {FrequencyState::zero(Law::Fourier, 1)};
    const std::string csv = trajectory_csv(tr);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
  }
}

TEST_SUITE("infrastructure") {
  TEST_CASE("worker resolution") {
    CHECK(resolve_workers(2) == 2);
    setenv("THERMOBEAM_WORKERS", "3", 1);
    CHECK(resolve_workers(0) == 3);
    setenv("THERMOBEAM_WORKERS", "lots", 1);
    CHECK_THROWS_AS(resolve_workers(0), ConfigError);
    unsetenv("THERMOBEAM_WORKERS");
    CHECK(resolve_workers(0) >= 1);
  }

  TEST_CASE("parallel_for runs every index and rethrows the lowest failure") {
    std::vector<int> hits(50, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) CHECK(h == 1);
    try {
      parallel_for(20, 4, [](std::size_t i) {
        if (i == 7 || i == 3) throw DomainError("task " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()) == "task 3");
    }
  }

  TEST_CASE("number formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  }

  TEST_CASE("csv round trip") {
    CsvTable t({"name", "a", "b"});
    t.add_row("x", {1.5, 2.0});
    t.add_row("y", {-3.0, 0.25});
    CHECK(t.rows() == 2);
    const fs::path dir = fresh_dir("csv");
    fs::create_directories(dir);
    write_text_file(dir / "t.csv", t.str());
    const CsvData d = read_csv(dir / "t.csv");
    CHECK(d.header == std::vector<std::string>{"name", "a", "b"});
    CHECK(d.rows[1][d.column("b")] == "0.25");
    CHECK_THROWS_AS(d.column("c"), DomainError);
    CHECK_THROWS_AS(read_csv(dir / "missing.csv"), DomainError);
  }

  TEST_CASE("result writer flushes in name order") {
    const fs::path dir = fresh_dir("writer");
    ResultWriter w(dir);
    w.put("b.txt", "2");
    w.put("a.txt", "1");
    const auto names = w.flush();
    CHECK(names == std::vector<std::string>{"a.txt", "b.txt"});
    CHECK(slurp(dir / "a.txt") == "1");
  }
}
