#include "biotfs/runner.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace biotfs {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view text, std::string_view key, int line) {
  const auto t = trim(text);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + std::string(t) + "'",
                      line);
  }
  return v;
}

int parse_int(std::string_view text, std::string_view key, int line) {
  const auto t = trim(text);
  int v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || end != t.data() + t.size()) {
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(t) + "'",
                      line);
  }
  return v;
}

std::vector<double> parse_list(std::string_view text, std::string_view key, int line) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma), key, line));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError("'" + std::string(key) + "' expects a list of numbers", line);
  return out;
}

struct KeyInfo {
  const char* section;
  const char* key;
  int priority;  // lower keys are applied first
};

// Presets first, then geometry (h depends on b), then everything else.
constexpr KeyInfo kKeys[] = {
    {"problem", "preset", 0},          {"problem", "a", 1},
    {"problem", "b", 1},               {"problem", "force", 1},
    {"material", "E", 2},              {"material", "nu", 2},
    {"material", "alpha", 2},          {"material", "beta", 2},
    {"material", "permeability", 2},   {"material", "permeability_darcy", 2},
    {"material", "viscosity", 2},      {"material", "skempton", 2},
    {"discretization", "nx", 3},       {"discretization", "ny", 3},
    {"discretization", "h", 3},        {"discretization", "tau", 3},
    {"discretization", "T", 3},        {"splitting", "method", 3},
    {"splitting", "L", 3},             {"splitting", "workers", 3},
    {"splitting", "max_iter", 3},      {"splitting", "tol", 3},
    {"splitting", "solver", 3},        {"output", "out", 3},
    {"output", "probes", 3},
};

const KeyInfo* find_key(std::string_view key) {
  for (const auto& k : kKeys) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

bool known_section(std::string_view s) {
  return std::any_of(std::begin(kKeys), std::end(kKeys),
                     [&](const KeyInfo& k) { return s == k.section; });
}

}  // namespace

// ---------------------------------------------------------------------------

LSpec LSpec::parse(std::string_view text) {
  const auto t = trim(text);
  LSpec s;
  if (t == "phys") {
    s.kind = Kind::Phys;
    s.value = 1.0;
  } else if (t == "min") {
    s.kind = Kind::Min;
    s.value = 1.0;
  } else {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || end != t.data() + t.size() || !(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("L must be 'phys', 'min' or a non-negative number, got '" +
                                  std::string(t) + "'");
    }
    s.kind = Kind::Value;
    s.value = v;
  }
  return s;
}

double LSpec::resolve(const MaterialParams& m) const {
  switch (kind) {
    case Kind::Phys:
      return value * m.l_phys();
    case Kind::Min:
      return value * m.l_min();
    case Kind::Value:
      break;
  }
  return value;
}

std::string LSpec::describe() const {
  switch (kind) {
    case Kind::Phys:
      return value == 1.0 ? "phys" : format_number(value) + "*phys";
    case Kind::Min:
      return value == 1.0 ? "min" : format_number(value) + "*min";
    case Kind::Value:
      break;
  }
  return format_number(value);
}

int RunConfig::steps() const {
  if (!(tau > 0.0) || !(total_time > 0.0)) {
    throw std::invalid_argument("time step and final time must be positive");
  }
  const double n = std::round(total_time / tau);
  if (n < 1.0 || std::abs(n * tau - total_time) > 1e-12 * std::max(1.0, total_time)) {
    throw std::invalid_argument("final time T must be an integer multiple of the time step");
  }
  return static_cast<int>(n);
}

SplitConfig RunConfig::split_config() const {
  SplitConfig s;
  s.stabilization = stabilization.resolve(mandel.material);
  s.tol = tol;
  s.max_iter = max_iter;
  s.workers = workers;
  s.solver.method = solver;
  if (solver == SolverMethod::CgJacobi) s.solver.max_iter = 200000;
  return s;
}

void RunConfig::validate() const {
  mandel.validate();
  if (nx < 1 || ny < 1) throw std::invalid_argument("nx and ny must be >= 1");
  steps();
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  for (double x : probes) {
    if (!(x >= 0.0 && x <= mandel.a)) throw std::invalid_argument("probe x outside [0, a]");
  }
  split_config().validate();
}

ConfigError::ConfigError(const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, int line) {
  value = trim(value);
  auto& m = cfg.mandel.material;
  auto num = [&] { return parse_double(value, key, line); };
  auto positive = [&] {
    const double v = num();
    if (!(v > 0.0)) throw ConfigError("'" + std::string(key) + "' must be positive", line);
    return v;
  };
  try {
    if (key == "preset") {
      cfg.mandel = mandel_preset(value);
      cfg.preset = std::string(value);
    } else if (key == "a") {
      cfg.mandel.a = positive();
    } else if (key == "b") {
      cfg.mandel.b = positive();
    } else if (key == "force") {
      cfg.mandel.force = positive();
    } else if (key == "E") {
      m.youngs_modulus = positive();
    } else if (key == "nu") {
      m.poisson_ratio = num();
    } else if (key == "alpha") {
      m.biot_coefficient = num();
    } else if (key == "beta") {
      m.biot_modulus = positive();
    } else if (key == "permeability") {
      m.permeability = positive();
    } else if (key == "permeability_darcy") {
      m.permeability = positive() * units::darcy;
    } else if (key == "viscosity") {
      m.viscosity = positive();
    } else if (key == "skempton") {
      m.skempton = num();
    } else if (key == "nx") {
      cfg.nx = parse_int(value, key, line);
    } else if (key == "ny") {
      cfg.ny = parse_int(value, key, line);
    } else if (key == "h") {
      const double h = positive();
      const double n = std::round(cfg.mandel.b / h);
      if (n < 1.0 || std::abs(n * h - cfg.mandel.b) > 1e-9 * cfg.mandel.b) {
        throw ConfigError("'h' must divide the height b", line);
      }
      cfg.nx = cfg.ny = static_cast<int>(n);
    } else if (key == "tau") {
      cfg.tau = positive();
    } else if (key == "T") {
      cfg.total_time = positive();
    } else if (key == "method") {
      if (value == "fs") {
        cfg.method = SplitMethod::FixedStress;
      } else if (value == "pfs") {
        cfg.method = SplitMethod::ParallelFixedStress;
      } else {
        throw ConfigError("'method' must be fs or pfs", line);
      }
    } else if (key == "L") {
      cfg.stabilization = LSpec::parse(value);
    } else if (key == "workers") {
      cfg.workers = parse_int(value, key, line);
    } else if (key == "max_iter") {
      cfg.max_iter = parse_int(value, key, line);
    } else if (key == "tol") {
      cfg.tol = positive();
    } else if (key == "solver") {
      if (value == "direct") {
        cfg.solver = SolverMethod::DirectCholesky;
      } else if (value == "cg") {
        cfg.solver = SolverMethod::CgJacobi;
      } else {
        throw ConfigError("'solver' must be direct or cg", line);
      }
    } else if (key == "out") {
      if (value.empty()) throw ConfigError("'out' must not be empty", line);
      cfg.out_dir = std::string(value);
    } else if (key == "probes") {
      cfg.probes = parse_list(value, key, line);
    } else {
      throw ConfigError("unknown key '" + std::string(key) + "'", line);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), line);
  }
}

RunConfig parse_config(std::string_view text) {
  struct Entry {
    std::string key;
    std::string value;
    int line;
    int priority;
  };
  std::vector<Entry> entries;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!known_section(name)) {
        throw ConfigError("unknown section '" + std::string(name) + "'", line_no);
      }
      section = std::string(name);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    const auto* info = find_key(key);
    if (info == nullptr) throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    if (!section.empty() && section != info->section) {
      throw ConfigError("key '" + std::string(key) + "' belongs in section [" + info->section + "]",
                        line_no);
    }
    for (const auto& e : entries) {
      if (e.key == key) {
        throw ConfigError("duplicate key '" + std::string(key) + "' (first set on line " +
                              std::to_string(e.line) + ")",
                          line_no);
      }
    }
    entries.push_back({std::string(key), std::string(value), line_no, info->priority});
  }

  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& x, const Entry& y) { return x.priority < y.priority; });
  RunConfig cfg;
  for (const auto& e : entries) apply_setting(cfg, e.key, e.value, e.line);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), 0);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, std::vector<std::string>>> config_schema() {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& k : kKeys) {
    if (out.empty() || out.back().first != k.section) out.push_back({k.section, {}});
    out.back().second.emplace_back(k.key);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

SplitResult solve_guarded(const MandelSetup& setup, const RunConfig& cfg, SplitMethod method,
                          const SplitConfig& split) {
  try {
    return split_solve(method, setup.system, setup.params.material, split, setup.initial_guess);
  } catch (const std::exception& e) {
    // Factorization failures surface before the first iteration.
    SplitResult r{setup.initial_guess, {}};
    r.report.method = method;
    r.report.stabilization = split.stabilization;
    r.report.theoretical_rate = theoretical_rate(cfg.mandel.material, split.stabilization);
    r.report.failure = e.what();
    return r;
  }
}

std::optional<MandelSolution> try_analytic(const MandelParams& mp) {
  try {
    return MandelSolution(mp);
  } catch (const std::exception&) {
    return std::nullopt;  // no series for B = 0 or alpha-decoupled overrides
  }
}

double plate_displacement(const RunOutcome& r, int n) {
  const int master = r.setup.system.dofs.tie_master;
  return master >= 0 ? r.result.state.u[n][master] : 0.0;
}

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

RunOutcome run(const RunConfig& cfg) {
  cfg.validate();
  auto setup = make_mandel_setup(cfg.mandel, cfg.nx, cfg.ny, cfg.steps(), cfg.tau);
  const auto split = cfg.split_config();
  auto result = solve_guarded(setup, cfg, cfg.method, split);
  return {cfg, std::move(setup), std::move(result), split.stabilization};
}

void write_solution_csv(std::ostream& os, const RunOutcome& r) {
  const auto analytic = try_analytic(r.config.mandel);
  os << "step,t,plate_uy,plate_uy_analytic";
  for (double x : r.config.probes) {
    os << ",p_x" << format_number(x) << ",p_analytic_x" << format_number(x);
  }
  os << '\n';
  const auto& state = r.result.state;
  for (int n = 0; n <= state.steps; ++n) {
    const double t = state.time(n);
    os << n << ',' << format_number(t) << ',' << format_number(plate_displacement(r, n)) << ','
       << (analytic ? format_number(analytic->plate_displacement(t)) : "");
    for (double x : r.config.probes) {
      os << ',' << format_number(evaluate_pressure(r.setup.mesh, state.p[n], x, 0.0)) << ',';
      // The series pressure is the post-loading field; level 0 is the
      // uniform undrained value.
      if (analytic) os << format_number(n == 0 ? analytic->initial_pressure()
                                               : analytic->pressure(x, t));
    }
    os << '\n';
  }
}

void write_iterations_csv(std::ostream& os, const RunOutcome& r) {
  const auto& rep = r.result.report;
  os << "method,step,iteration,increment_measure,increment_measure_l2,observed_rate,"
        "observed_rate_l2,theoretical_rate,max_pressure_increment,max_displacement_increment,"
        "criterion,flow_seconds,mechanics_seconds\n";
  for (const auto& it : rep.iterations) {
    os << to_string(rep.method) << ',' << it.step << ',' << it.iteration << ','
       << format_number(it.increment_measure) << ',' << format_number(it.increment_measure_l2)
       << ',' << optional_number(it.observed_rate) << ',' << optional_number(it.observed_rate_l2)
       << ',' << format_number(rep.theoretical_rate) << ','
       << format_number(it.max_pressure_increment) << ','
       << format_number(it.max_displacement_increment) << ',' << format_number(it.criterion)
       << ',' << format_number(it.flow_seconds) << ',' << format_number(it.mechanics_seconds)
       << '\n';
  }
}

void write_summary(std::ostream& os, const RunOutcome& r) {
  const auto& c = r.config;
  const auto& m = c.mandel.material;
  const auto& rep = r.result.report;
  const double stages = rep.flow_seconds + rep.mechanics_seconds;
  os << "method: " << to_string(rep.method) << '\n'
     << "preset: " << c.preset << '\n'
     << "poisson_ratio: " << format_number(m.poisson_ratio) << '\n'
     << "grid: " << c.nx << " x " << c.ny << '\n'
     << "tau: " << format_number(c.tau) << '\n'
     << "final_time: " << format_number(c.total_time) << '\n'
     << "steps: " << c.steps() << '\n'
     << "solver: " << (c.solver == SolverMethod::DirectCholesky ? "direct" : "cg") << '\n'
     << "workers: " << c.workers << '\n'
     << "L_spec: " << c.stabilization.describe() << '\n'
     << "L_used: " << format_number(r.stabilization) << '\n'
     << "L_phys: " << format_number(m.l_phys()) << '\n'
     << "L_min: " << format_number(m.l_min()) << '\n'
     << "rate_bound: " << format_number(rep.theoretical_rate) << '\n'
     << "iterations: " << rep.iteration_count << '\n';
  if (rep.method == SplitMethod::FixedStress) {
    os << "mean_step_iterations: " << format_number(rep.mean_step_iterations) << '\n';
  }
  os << "converged: " << (rep.converged ? "yes" : "no") << '\n';
  if (!rep.failure.empty()) os << "failure: " << rep.failure << '\n';
  if (rep.failed_step >= 0) os << "failed_step: " << rep.failed_step << '\n';
  for (const auto& w : rep.warnings) os << "warning: " << w << '\n';
  os << "setup_seconds: " << format_number(rep.setup_seconds) << '\n'
     << "flow_seconds: " << format_number(rep.flow_seconds) << '\n'
     << "mechanics_seconds: " << format_number(rep.mechanics_seconds) << '\n'
     << "mechanics_share: " << format_number(stages > 0.0 ? rep.mechanics_seconds / stages : 0.0)
     << '\n'
     << "\n"
     << "solution.csv columns: step, t [s], plate_uy = u_y on the plate [m] and its series\n"
     << "  value, then per probe x on y = 0 the pressure [Pa] and its series value.\n"
     << "iterations.csv columns: method, step (time level for fs, 0 for pfs), iteration,\n"
     << "  increment_measure = sum_n tau |(dp^n - dp^{n-1})/tau|^2 (Euclidean),\n"
     << "  increment_measure_l2 (pressure mass norm), observed_rate(_l2) = ratio to the\n"
     << "  previous iteration (empty at i = 1), theoretical_rate = L/(1/beta + L),\n"
     << "  max_pressure_increment, max_displacement_increment = max_n of the Euclidean\n"
     << "  increments, criterion = max_n (tol_p |dp| + tol_u |du|), stage wall times [s].\n";
}

void write_run_outputs(const RunOutcome& r) {
  std::filesystem::create_directories(r.config.out_dir);
  auto open = [&](const char* name) {
    std::ofstream f(r.config.out_dir / name);
    if (!f) throw std::runtime_error("cannot write " + (r.config.out_dir / name).string());
    return f;
  };
  auto sol = open("solution.csv");
  write_solution_csv(sol, r);
  auto its = open("iterations.csv");
  write_iterations_csv(its, r);
  auto sum = open("summary.txt");
  write_summary(sum, r);
}

// ---------------------------------------------------------------------------

std::vector<double> geometric_l_grid(const MaterialParams& m, int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("geometric_l_grid: empty exponent range");
  std::vector<double> grid;
  for (int k = lo; k <= hi; ++k) grid.push_back(std::ldexp(m.l_phys(), k));
  return grid;
}

std::vector<SweepRow> l_sweep(const RunConfig& cfg, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("l_sweep: empty L grid");
  for (double l : grid) {
    if (!(l > 0.0)) throw std::invalid_argument("l_sweep: L values must be positive");
  }
  cfg.validate();
  const auto setup = make_mandel_setup(cfg.mandel, cfg.nx, cfg.ny, cfg.steps(), cfg.tau);
  const double l_phys = cfg.mandel.material.l_phys();
  std::vector<SweepRow> rows;
  for (auto method : {SplitMethod::ParallelFixedStress, SplitMethod::FixedStress}) {
    for (double l : grid) {
      auto split = cfg.split_config();
      split.stabilization = l;
      const auto res = solve_guarded(setup, cfg, method, split);
      rows.push_back({method, l_phys > 0.0 ? l / l_phys : 0.0, l, res.report.iteration_count,
                      res.report.mean_step_iterations, res.report.converged});
    }
  }
  return rows;
}

double ranking_iterations(const SweepRow& row) {
  return row.method == SplitMethod::FixedStress ? row.mean_step_iterations
                                                : static_cast<double>(row.iterations);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "method,L,L_over_L_phys,iterations,mean_step_iterations,converged\n";
  for (const auto& r : rows) {
    os << to_string(r.method) << ',' << format_number(r.stabilization) << ','
       << format_number(r.factor) << ',' << r.iterations << ','
       << format_number(r.mean_step_iterations) << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

std::vector<RefinementRow> refinement_table(const RunConfig& tau_cfg,
                                            const std::vector<double>& tau_list,
                                            const RunConfig& h_cfg,
                                            const std::vector<double>& h_list) {
  if (tau_list.empty() || h_list.empty()) {
    throw std::invalid_argument("refinement_table: empty tau or h list");
  }
  std::vector<RefinementRow> rows;
  auto one = [&](RunConfig cfg, const char* block) {
    const auto setup = make_mandel_setup(cfg.mandel, cfg.nx, cfg.ny, cfg.steps(), cfg.tau);
    const auto split = cfg.split_config();
    const auto pfs = solve_guarded(setup, cfg, SplitMethod::ParallelFixedStress, split);
    const auto fs = solve_guarded(setup, cfg, SplitMethod::FixedStress, split);
    rows.push_back({block, cfg.preset, cfg.tau, cfg.mandel.b / cfg.ny, cfg.nx, cfg.ny,
                    pfs.report.iteration_count, fs.report.mean_step_iterations,
                    pfs.report.converged && fs.report.converged});
  };
  for (double tau : tau_list) {
    RunConfig cfg = tau_cfg;
    cfg.tau = tau;
    cfg.validate();
    one(cfg, "tau");
  }
  for (double h : h_list) {
    RunConfig cfg = h_cfg;
    apply_setting(cfg, "h", format_number(h));
    cfg.validate();
    one(cfg, "h");
  }
  return rows;
}

void write_refinement_csv(std::ostream& os, const std::vector<RefinementRow>& rows) {
  os << "block,preset,tau,h,nx,ny,pfs_iterations,fs_mean_iterations,converged\n";
  for (const auto& r : rows) {
    os << r.block << ',' << r.preset << ',' << format_number(r.tau) << ',' << format_number(r.h)
       << ',' << r.nx << ',' << r.ny << ',' << r.pfs_iterations << ','
       << format_number(r.fs_mean_iterations) << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

std::vector<BenchRow> bench(const RunConfig& cfg, const std::vector<int>& worker_counts) {
  if (worker_counts.empty()) throw std::invalid_argument("bench: no worker counts");
  for (int w : worker_counts) {
    if (w < 1) throw std::invalid_argument("bench: worker counts must be >= 1");
  }
  cfg.validate();
  const auto setup = make_mandel_setup(cfg.mandel, cfg.nx, cfg.ny, cfg.steps(), cfg.tau);

  auto row_of = [](const SplitResult& res, int workers) {
    const auto& rep = res.report;
    BenchRow b;
    b.method = rep.method;
    b.workers = workers;
    b.iterations = rep.iteration_count;
    b.converged = rep.converged;
    b.setup_seconds = rep.setup_seconds;
    b.flow_seconds = rep.flow_seconds;
    b.mechanics_seconds = rep.mechanics_seconds;
    b.total_seconds = rep.setup_seconds + rep.flow_seconds + rep.mechanics_seconds;
    const double stages = rep.flow_seconds + rep.mechanics_seconds;
    b.flow_share = stages > 0.0 ? rep.flow_seconds / stages : 0.0;
    b.mechanics_share = stages > 0.0 ? rep.mechanics_seconds / stages : 0.0;
    for (const auto& p : res.state.p) {
      for (double v : p) b.final_pressure_norm = std::max(b.final_pressure_norm, std::abs(v));
    }
    for (const auto& u : res.state.u) {
      for (double v : u) b.final_displacement_norm = std::max(b.final_displacement_norm, std::abs(v));
    }
    return b;
  };

  std::vector<BenchRow> rows;
  auto split = cfg.split_config();
  split.workers = 1;
  rows.push_back(row_of(solve_guarded(setup, cfg, SplitMethod::FixedStress, split), 1));
  for (int w : worker_counts) {
    split.workers = w;
    rows.push_back(row_of(solve_guarded(setup, cfg, SplitMethod::ParallelFixedStress, split), w));
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "method,workers,iterations,converged,setup_seconds,flow_seconds,mechanics_seconds,"
        "total_seconds,flow_share,mechanics_share,max_abs_pressure,max_abs_displacement\n";
  for (const auto& r : rows) {
    os << to_string(r.method) << ',' << r.workers << ',' << r.iterations << ','
       << (r.converged ? 1 : 0) << ',' << format_number(r.setup_seconds) << ','
       << format_number(r.flow_seconds) << ',' << format_number(r.mechanics_seconds) << ','
       << format_number(r.total_seconds) << ',' << format_number(r.flow_share) << ','
       << format_number(r.mechanics_share) << ',' << format_number(r.final_pressure_norm) << ','
       << format_number(r.final_displacement_norm) << '\n';
  }
}

void write_analytic_csv(std::ostream& os, const MandelParams& mp, const std::vector<double>& times,
                        int samples) {
  if (samples < 1) throw std::invalid_argument("write_analytic_csv: need at least one interval");
  const MandelSolution sol(mp);
  os << "t,x,pressure,plate_ux,plate_uy\n";
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("write_analytic_csv: times must be positive");
    for (int i = 0; i <= samples; ++i) {
      const double x = (i == samples) ? mp.a : i * mp.a / samples;
      const auto u = sol.displacement(x, mp.b, t);
      os << format_number(t) << ',' << format_number(x) << ',' << format_number(sol.pressure(x, t))
         << ',' << format_number(u[0]) << ',' << format_number(u[1]) << '\n';
    }
  }
}

}  // namespace biotfs
