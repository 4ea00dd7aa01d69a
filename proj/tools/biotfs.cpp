// Experiment runner for the Mandel consolidation benchmark: single runs,
// stabilization sweeps, refinement tables, timing benches and series dumps.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "biotfs/runner.hpp"

namespace {

using namespace biotfs;

// Options shared by every subcommand that runs the splitting.
struct CommonOptions {
  std::string config;
  std::string preset;
  std::string method;
  std::string stabilization;
  int workers = 0;
  std::string out;
  std::vector<std::string> settings;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
    app->add_option("--preset", preset, "material preset (fig3, nu0.4, ..., nu0.49999)");
    app->add_option("--method", method, "splitting method")->check(CLI::IsMember({"fs", "pfs"}));
    app->add_option("--L", stabilization, "stabilization: a value, 'phys' or 'min'");
    app->add_option("--workers", workers, "threads for the mechanics stage")
        ->check(CLI::PositiveNumber);
    app->add_option("--out", out, "output directory");
    app->add_option("--set", settings, "extra config setting key=value (repeatable)");
  }

  RunConfig resolve() const {
    RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
    // The preset replaces the material, so it goes first.
    if (!preset.empty()) apply_setting(cfg, "preset", preset);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'", 0);
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!method.empty()) apply_setting(cfg, "method", method);
    if (!stabilization.empty()) apply_setting(cfg, "L", stabilization);
    if (workers > 0) cfg.workers = workers;
    if (!out.empty()) cfg.out_dir = out;
    cfg.validate();
    return cfg;
  }
};

std::ofstream open_output(const std::filesystem::path& dir, const char* name) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / name);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

int cmd_run(const CommonOptions& opts) {
  const auto cfg = opts.resolve();
  const auto outcome = run(cfg);
  write_run_outputs(outcome);
  const auto& rep = outcome.result.report;
  std::cout << to_string(rep.method) << " " << cfg.preset << ": " << rep.iteration_count
            << " iterations, " << (rep.converged ? "converged" : "NOT converged");
  if (rep.method == SplitMethod::FixedStress) {
    std::cout << " (mean " << rep.mean_step_iterations << " per step)";
  }
  std::cout << "\n";
  if (!rep.failure.empty()) std::cerr << "failure: " << rep.failure << "\n";
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "outputs written to " << cfg.out_dir.string() << "\n";
  return rep.converged ? 0 : 1;
}

int cmd_sweep(const CommonOptions& opts, int lo, int hi, const std::vector<double>& factors) {
  const auto cfg = opts.resolve();
  std::vector<double> grid;
  if (factors.empty()) {
    grid = geometric_l_grid(cfg.mandel.material, lo, hi);
  } else {
    for (double f : factors) grid.push_back(f * cfg.mandel.material.l_phys());
  }
  const auto rows = l_sweep(cfg, grid);
  auto f = open_output(cfg.out_dir, "l_sweep.csv");
  write_sweep_csv(f, rows);
  write_sweep_csv(std::cout, rows);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.converged;
  return ok ? 0 : 1;
}

int cmd_refine(const CommonOptions& opts, const std::string& tau_preset,
               const std::string& h_preset, const std::vector<double>& taus,
               const std::vector<double>& hs) {
  const auto base = opts.resolve();
  RunConfig tau_cfg = base;
  apply_setting(tau_cfg, "preset", tau_preset);
  RunConfig h_cfg = base;
  apply_setting(h_cfg, "preset", h_preset);
  const auto rows = refinement_table(tau_cfg, taus, h_cfg, hs);
  auto f = open_output(base.out_dir, "refinement.csv");
  write_refinement_csv(f, rows);
  write_refinement_csv(std::cout, rows);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.converged;
  return ok ? 0 : 1;
}

int cmd_bench(const CommonOptions& opts, const std::vector<int>& worker_counts) {
  const auto cfg = opts.resolve();
  const auto rows = bench(cfg, worker_counts);
  auto f = open_output(cfg.out_dir, "bench.csv");
  write_bench_csv(f, rows);
  write_bench_csv(std::cout, rows);
  bool ok = true;
  for (const auto& r : rows) ok = ok && r.converged;
  return ok ? 0 : 1;
}

int cmd_analytic(const CommonOptions& opts, const std::vector<double>& times, int samples) {
  const auto cfg = opts.resolve();
  auto f = open_output(cfg.out_dir, "analytic.csv");
  write_analytic_csv(f, cfg.mandel, times, samples);
  std::cout << "analytic profiles written to " << (cfg.out_dir / "analytic.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-stress and parallel-in-time fixed-stress splitting for Biot consolidation"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, refine_opts, bench_opts, analytic_opts;

  auto* run_cmd = app.add_subcommand("run", "run one splitting and write CSV reports");
  run_opts.attach(run_cmd);

  auto* sweep_cmd = app.add_subcommand("l-sweep", "iterations of fs and pfs over a grid of L");
  sweep_opts.attach(sweep_cmd);
  int lo = -3, hi = 3;
  std::vector<double> factors;
  sweep_cmd->add_option("--lo", lo, "smallest exponent k of L_phy * 2^k");
  sweep_cmd->add_option("--hi", hi, "largest exponent k of L_phy * 2^k");
  sweep_cmd->add_option("--factors", factors, "explicit L / L_phy values (overrides --lo/--hi)")
      ->delimiter(',');

  auto* refine_cmd = app.add_subcommand("refine-table", "iteration counts under refinement");
  refine_opts.attach(refine_cmd);
  std::string tau_preset = "nu0.49999", h_preset = "nu0.499";
  std::vector<double> taus{1.0, 0.5, 0.25, 0.125}, hs{0.5, 0.25, 0.125, 0.0625};
  refine_cmd->add_option("--tau-preset", tau_preset, "preset of the time-step block");
  refine_cmd->add_option("--h-preset", h_preset, "preset of the mesh block");
  refine_cmd->add_option("--taus", taus, "time steps")->delimiter(',');
  refine_cmd->add_option("--hs", hs, "mesh sizes (b / ny)")->delimiter(',');

  auto* bench_cmd = app.add_subcommand("bench", "stage wall times per worker count");
  bench_opts.attach(bench_cmd);
  std::vector<int> worker_counts{1, 2, 4, 8};
  bench_cmd->add_option("--worker-counts", worker_counts, "worker counts for pfs")->delimiter(',');

  auto* analytic_cmd = app.add_subcommand("analytic", "dump series pressure and displacement");
  analytic_opts.attach(analytic_cmd);
  std::vector<double> times{1.0, 5.0, 10.0, 20.0, 30.0};
  int samples = 40;
  analytic_cmd->add_option("--times", times, "output times")->delimiter(',');
  analytic_cmd->add_option("--samples", samples, "intervals along x")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run_opts);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, lo, hi, factors);
    if (*refine_cmd) return cmd_refine(refine_opts, tau_preset, h_preset, taus, hs);
    if (*bench_cmd) return cmd_bench(bench_opts, worker_counts);
    if (*analytic_cmd) return cmd_analytic(analytic_opts, times, samples);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
