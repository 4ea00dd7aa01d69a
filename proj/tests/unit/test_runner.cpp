#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "biotfs/runner.hpp"

using namespace biotfs;

namespace {

RunConfig tiny(const char* preset) {
  RunConfig cfg;
  apply_setting(cfg, "preset", preset);
  cfg.nx = cfg.ny = 6;
  cfg.total_time = 4.0;
  return cfg;
}

std::string to_text(void (*writer)(std::ostream&, const RunOutcome&), const RunOutcome& r) {
  std::ostringstream os;
  writer(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(R"(# Mandel sweep point
[problem]
preset = nu0.499   # material preset

[material]
alpha = 0.9
[discretization]
h = 0.5
tau = 0.5
T = 8
[splitting]
method = fs
L = min
workers = 3
solver = cg
[output]
out = results/a
probes = 0, 50
)");
  CHECK(cfg.preset == "nu0.499");
  CHECK(cfg.mandel.material.poisson_ratio == 0.499);
  CHECK(cfg.mandel.material.biot_coefficient == 0.9);
  CHECK(cfg.nx == 20);
  CHECK(cfg.ny == 20);
  CHECK(cfg.steps() == 16);
  CHECK(cfg.method == SplitMethod::FixedStress);
  CHECK(cfg.stabilization.kind == LSpec::Kind::Min);
  CHECK(cfg.split_config().stabilization == cfg.mandel.material.l_min());
  CHECK(cfg.workers == 3);
  CHECK(cfg.solver == SolverMethod::CgJacobi);
  CHECK(cfg.out_dir == "results/a");
  CHECK(cfg.probes == std::vector<double>{0.0, 50.0});
}

TEST_CASE("material overrides survive a later preset line") {
  const auto cfg = parse_config("nu = 0.3\npreset = nu0.4\n");
  CHECK(cfg.mandel.material.poisson_ratio == 0.3);
  CHECK(cfg.preset == "nu0.4");
}

TEST_CASE("config errors carry line numbers") {
  auto line_of = [](const char* text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("nx = 4\nbogus = 1\n") == 2);
  CHECK(line_of("# c\n\nnx = four\n") == 3);
  CHECK(line_of("[splitting]\nnx = 4\n") == 2);
  CHECK(line_of("[nowhere]\n") == 1);
  CHECK(line_of("[splitting\n") == 1);
  CHECK(line_of("nx 4\n") == 1);
  CHECK(line_of("nx = 4\nnx = 5\n") == 2);
  CHECK(line_of("method = sideways\n") == 1);
  CHECK(line_of("L = -1\n") == 1);
  CHECK(line_of("preset = nu0.3\n") == 1);
  CHECK(line_of("h = 0.3\n") == 1);
  // Whole-config problems are not tied to a line.
  CHECK(line_of("tau = 0.3\nT = 1\n") == 0);
  CHECK(line_of("nu = 0.7\n") == 0);
  CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), ConfigError);
}

TEST_CASE("stabilization specifications") {
  const auto m = mandel_preset("fig3").material;
  CHECK(LSpec::parse("phys").resolve(m) == m.l_phys());
  CHECK(LSpec::parse(" min ").resolve(m) == m.l_min());
  CHECK(LSpec::parse("1e-10").resolve(m) == 1e-10);
  CHECK(LSpec::parse("0").resolve(m) == 0.0);
  CHECK_THROWS_AS(LSpec::parse("fast"), std::invalid_argument);
  CHECK_THROWS_AS(LSpec::parse("-2"), std::invalid_argument);
  CHECK(RunConfig{}.split_config().stabilization == m.l_phys());
}

TEST_CASE("step count must be an integer") {
  RunConfig cfg;
  cfg.tau = 0.125;
  cfg.total_time = 32.0;
  CHECK(cfg.steps() == 256);
  cfg.tau = 0.3;
  CHECK_THROWS_AS(cfg.steps(), std::invalid_argument);
  cfg.tau = 0.0;
  CHECK_THROWS_AS(cfg.steps(), std::invalid_argument);
}

TEST_CASE("schema lists every section") {
  const auto schema = config_schema();
  CHECK(schema.size() == 5);
  CHECK(schema.front().first == "problem");
}

TEST_CASE("run reports") {
  auto cfg = tiny("nu0.49999");
  const auto r = run(cfg);
  CHECK(r.result.report.converged);
  CHECK(r.result.report.iteration_count == 2);
  CHECK(r.stabilization == cfg.mandel.material.l_phys());

  const auto sol = to_text(write_solution_csv, r);
  std::istringstream lines(sol);
  std::string header, row0;
  std::getline(lines, header);
  std::getline(lines, row0);
  CHECK(header.rfind("step,t,plate_uy,plate_uy_analytic,p_x", 0) == 0);
  CHECK(row0.rfind("0,0.0000000000000000e+00,", 0) == 0);
  int rows = 1;
  for (std::string l; std::getline(lines, l);) ++rows;
  CHECK(rows == 5);

  const auto its = to_text(write_iterations_csv, r);
  CHECK(its.find("method,step,iteration,increment_measure") == 0);
  // Observed rate empty at the first iteration.
  CHECK(its.find("\npfs,0,1,") != std::string::npos);

  const auto summary = to_text(write_summary, r);
  CHECK(summary.find("iterations: 2\n") != std::string::npos);
  CHECK(summary.find("converged: yes\n") != std::string::npos);
  CHECK(summary.find("L_spec: phys\n") != std::string::npos);

  // Re-running reproduces the non-timing outputs byte for byte.
  const auto again = run(cfg);
  CHECK(to_text(write_solution_csv, again) == sol);

  // Same fixed point from the sequential scheme.
  cfg.method = SplitMethod::FixedStress;
  const auto fs = run(cfg);
  CHECK(fs.result.report.converged);
  CHECK(to_text(write_summary, fs).find("mean_step_iterations: ") != std::string::npos);
}

TEST_CASE("decoupled run") {
  auto cfg = tiny("fig3");
  apply_setting(cfg, "alpha", "0");
  const auto r = run(cfg);
  CHECK(r.result.report.converged);
  CHECK(r.result.report.iterations.back().increment_measure == 0.0);
  const auto its = to_text(write_iterations_csv, r);
  std::istringstream lines(its);
  std::string l;
  std::getline(lines, l);
  std::getline(lines, l);
  std::getline(lines, l);
  // observed_rate column of iteration 2 is exactly zero
  CHECK(l.find(",0.0000000000000000e+00,") != std::string::npos);
}

TEST_CASE("failures end up in the report") {
  auto cfg = tiny("fig3");
  cfg.max_iter = 1;
  const auto r = run(cfg);
  CHECK_FALSE(r.result.report.converged);
  CHECK(to_text(write_summary, r).find("converged: no\n") != std::string::npos);
}

TEST_CASE("output files") {
  auto cfg = tiny("fig3");
  cfg.out_dir = std::filesystem::temp_directory_path() / "biotfs_runner_test";
  std::filesystem::remove_all(cfg.out_dir);
  write_run_outputs(run(cfg));
  for (const char* f : {"solution.csv", "iterations.csv", "summary.txt"}) {
    CHECK(std::filesystem::exists(cfg.out_dir / f));
  }
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("L sweep") {
  auto cfg = tiny("nu0.4");
  const auto grid = geometric_l_grid(cfg.mandel.material, -1, 1);
  REQUIRE(grid.size() == 3);
  CHECK(grid[1] == cfg.mandel.material.l_phys());
  const auto rows = l_sweep(cfg, grid);
  CHECK(rows.size() == 6);
  for (const auto& r : rows) CHECK(r.converged);
  CHECK(rows[1].factor == doctest::Approx(1.0));
  CHECK(ranking_iterations(rows[0]) == rows[0].iterations);
  CHECK(ranking_iterations(rows[4]) == rows[4].mean_step_iterations);
  std::ostringstream os;
  write_sweep_csv(os, rows);
  CHECK(os.str().find("method,L,L_over_L_phys,iterations") == 0);
  CHECK_THROWS_AS(l_sweep(cfg, {}), std::invalid_argument);
  CHECK_THROWS_AS(l_sweep(cfg, {-1.0}), std::invalid_argument);
}

TEST_CASE("refinement table layout") {
  auto tau_cfg = tiny("nu0.49999");
  auto h_cfg = tiny("nu0.499");
  const auto rows = refinement_table(tau_cfg, {1.0, 0.5}, h_cfg, {2.5, 1.25});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].block == "tau");
  CHECK(rows[1].tau == 0.5);
  CHECK(rows[2].block == "h");
  CHECK(rows[2].ny == 4);
  CHECK(rows[3].nx == 8);
  for (const auto& r : rows) CHECK(r.converged);
  CHECK(rows[0].pfs_iterations == 2);
  std::ostringstream os;
  write_refinement_csv(os, rows);
  CHECK(os.str().find("block,preset,tau,h,nx,ny,pfs_iterations,fs_mean_iterations") == 0);
  CHECK_THROWS_AS(refinement_table(tau_cfg, {}, h_cfg, {1.0}), std::invalid_argument);
}

TEST_CASE("bench rows") {
  auto cfg = tiny("nu0.499");
  const auto rows = bench(cfg, {1, 2});
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].method == SplitMethod::FixedStress);
  CHECK(rows[1].final_pressure_norm == rows[2].final_pressure_norm);
  CHECK(rows[1].final_displacement_norm == rows[2].final_displacement_norm);
  for (const auto& r : rows) {
    CHECK(r.flow_share + r.mechanics_share == doctest::Approx(1.0));
  }
  std::ostringstream os;
  write_bench_csv(os, rows);
  CHECK(os.str().find("method,workers,iterations,converged") == 0);
  CHECK_THROWS_AS(bench(cfg, {}), std::invalid_argument);
}

TEST_CASE("analytic dump") {
  std::ostringstream os;
  write_analytic_csv(os, mandel_preset("fig3"), {1.0, 2.0}, 4);
  std::istringstream lines(os.str());
  int n = 0;
  for (std::string l; std::getline(lines, l);) ++n;
  CHECK(n == 1 + 2 * 5);
  CHECK_THROWS_AS(write_analytic_csv(os, mandel_preset("fig3"), {0.0}, 4), std::invalid_argument);
}

TEST_CASE("number format") {
  CHECK(format_number(1.0) == "1.0000000000000000e+00");
  CHECK(format_number(-0.25) == "-2.5000000000000000e-01");
}
