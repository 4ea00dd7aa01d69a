#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "biotfs/mandel.hpp"
#include "biotfs/splitting.hpp"

namespace biotfs {

/// Stabilization choice: an explicit value, or the physical / minimal one
/// derived from the material.
struct LSpec {
  enum class Kind { Value, Phys, Min };
  Kind kind = Kind::Phys;
  double value = 1.0;  // Value: L itself; Phys/Min: multiplier

  static LSpec parse(std::string_view text);
  double resolve(const MaterialParams& m) const;
  std::string describe() const;
};

/// Everything one experiment needs. Defaults reproduce the benchmark
/// discretization: 40x40 grid, tau = 1 s, T = 32 s, L = L_phy.
struct RunConfig {
  std::string preset = "fig3";
  MandelParams mandel = mandel_preset("fig3");
  int nx = 40;
  int ny = 40;
  double tau = 1.0;
  double total_time = 32.0;
  SplitMethod method = SplitMethod::ParallelFixedStress;
  SolverMethod solver = SolverMethod::DirectCholesky;
  LSpec stabilization{};
  int workers = 1;
  int max_iter = 500;
  double tol = 1e-8;
  /// x positions on y = 0 where solution.csv reports the pressure.
  std::vector<double> probes{0.0, 25.0, 50.0, 75.0};
  std::filesystem::path out_dir = "out";

  /// Number of time steps; throws std::invalid_argument unless T/tau is an
  /// integer to 1e-12.
  int steps() const;
  SplitConfig split_config() const;
  void validate() const;
};

/// Config file error carrying the offending line (0 when not line bound).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line);
  int line() const { return line_; }

 private:
  int line_;
};

/**
 * Parses the flat "key = value" format: '#' starts a comment, "[section]"
 * headers group keys, and a key may only appear under its own section (or
 * before any header). Material overrides apply on top of the preset no
 * matter where they appear in the file.
 */
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Applies one key = value pair; throws ConfigError(line) on bad input.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, int line = 0);

/// Keys accepted by the config format, grouped by section.
std::vector<std::pair<std::string, std::vector<std::string>>> config_schema();

struct RunOutcome {
  RunConfig config;
  MandelSetup setup;
  SplitResult result;
  double stabilization = 0.0;
};

/// Builds the Mandel problem and runs the chosen splitting. Solver failures
/// end up in result.report (converged = false), never as exceptions.
RunOutcome run(const RunConfig& cfg);

/// Per time level: step, t, plate displacement (numerical and analytic) and
/// the probe pressures.
void write_solution_csv(std::ostream& os, const RunOutcome& r);
/// Per iteration: increment measures, observed and theoretical rate, stage
/// wall times.
void write_iterations_csv(std::ostream& os, const RunOutcome& r);
void write_summary(std::ostream& os, const RunOutcome& r);
/// Writes solution.csv, iterations.csv and summary.txt into cfg.out_dir.
void write_run_outputs(const RunOutcome& r);

struct SweepRow {
  SplitMethod method = SplitMethod::ParallelFixedStress;
  double factor = 1.0;  // L / L_phy
  double stabilization = 0.0;
  int iterations = 0;   // global (pfs) or total (fs)
  double mean_step_iterations = 0.0;
  bool converged = false;
};

/// L_phy * 2^k for k = lo..hi.
std::vector<double> geometric_l_grid(const MaterialParams& m, int lo = -3, int hi = 3);

/// Both methods over every L of the grid on the config's discretization.
/// Failed runs are recorded as unconverged.
std::vector<SweepRow> l_sweep(const RunConfig& cfg, const std::vector<double>& grid);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// "Iterations" used to rank L values: global count for pfs, mean per step
/// for fs.
double ranking_iterations(const SweepRow& row);

struct RefinementRow {
  std::string block;  // "tau" or "h"
  std::string preset;
  double tau = 0.0;
  double h = 0.0;
  int nx = 0;
  int ny = 0;
  int pfs_iterations = 0;
  double fs_mean_iterations = 0.0;
  bool converged = false;
};

/// Time-step block at the config's preset with h fixed, then mesh block with
/// tau fixed. Mesh size h means nx = a/h_x with the benchmark's 1:10 aspect,
/// i.e. ny = b/h and nx = ny.
std::vector<RefinementRow> refinement_table(const RunConfig& tau_cfg,
                                            const std::vector<double>& tau_list,
                                            const RunConfig& h_cfg,
                                            const std::vector<double>& h_list);
void write_refinement_csv(std::ostream& os, const std::vector<RefinementRow>& rows);

struct BenchRow {
  SplitMethod method = SplitMethod::ParallelFixedStress;
  int workers = 1;
  int iterations = 0;
  bool converged = false;
  double setup_seconds = 0.0;
  double flow_seconds = 0.0;
  double mechanics_seconds = 0.0;
  double total_seconds = 0.0;
  double flow_share = 0.0;
  double mechanics_share = 0.0;
  /// Max |p| and |u| over all time levels, for the determinism check.
  double final_pressure_norm = 0.0;
  double final_displacement_norm = 0.0;
};

/// One sequential fs run, then one pfs run per worker count.
std::vector<BenchRow> bench(const RunConfig& cfg, const std::vector<int>& worker_counts);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

/// Analytic pressure along y = 0 and plate displacement at the given times,
/// sampled at samples+1 equally spaced x positions.
void write_analytic_csv(std::ostream& os, const MandelParams& mp, const std::vector<double>& times,
                        int samples);

/// "%.16e" formatting used by every CSV writer.
std::string format_number(double v);

}  // namespace biotfs
