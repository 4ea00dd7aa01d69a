#include "biotfs/splitting.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>
#include <thread>

namespace biotfs {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

double mass_norm_sq(const SparseMatrixCSR& m, std::span<const double> x) {
  const auto mx = spmv(m, x);
  return dot(x, mx);
}

// Increment statistics of iteration i against the lagged iterate on levels
// [first, last].
struct IncrementStats {
  double measure = 0.0;
  double measure_l2 = 0.0;
  double max_dp = 0.0;
  double max_du = 0.0;
  double criterion = 0.0;
};

IncrementStats increment_stats(const SplittingOperators& ops, const SpaceTimeState& lagged,
                               const SpaceTimeState& current, int first, int last) {
  const auto& cfg = ops.config();
  const auto& mass = ops.system().raw.pressure_mass;
  const double tau = ops.tau();
  IncrementStats s;
  std::vector<double> dp_prev(current.p[0].size(), 0.0);
  for (int n = first; n <= last; ++n) {
    const auto dp = difference(current.p[n], lagged.p[n]);
    const auto du = difference(current.u[n], lagged.u[n]);
    const double np = norm2(dp);
    const double nu = norm2(du);
    s.max_dp = std::max(s.max_dp, np);
    s.max_du = std::max(s.max_du, nu);
    s.criterion = std::max(s.criterion, cfg.tol_p * np + cfg.tol_u * nu);

    // Discrete time derivative of the increment; the increment vanishes on
    // the level preceding `first` (initial level or converged step).
    std::vector<double> rate(dp.size());
    for (std::size_t k = 0; k < dp.size(); ++k) rate[k] = (dp[k] - dp_prev[k]) / tau;
    s.measure += tau * dot(rate, rate);
    s.measure_l2 += tau * mass_norm_sq(mass, rate);
    dp_prev = dp;
  }
  return s;
}

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

SpaceTimeState SpaceTimeState::constant(std::vector<double> u0, std::vector<double> p0, int steps,
                                        double tau) {
  if (steps < 1) throw std::invalid_argument("SpaceTimeState: need at least one time step");
  if (!(tau > 0.0)) throw std::invalid_argument("SpaceTimeState: time step must be positive");
  SpaceTimeState s;
  s.tau = tau;
  s.steps = steps;
  s.u.assign(steps + 1, std::move(u0));
  s.p.assign(steps + 1, std::move(p0));
  return s;
}

void SplitConfig::validate() const {
  if (!(stabilization >= 0.0)) throw std::invalid_argument("SplitConfig: L must be non-negative");
  if (!(tol > 0.0) || !(tol_p >= 0.0) || !(tol_u >= 0.0)) {
    throw std::invalid_argument("SplitConfig: tolerances must be positive");
  }
  if (max_iter < 1) throw std::invalid_argument("SplitConfig: max_iter must be >= 1");
  if (workers < 1) throw std::invalid_argument("SplitConfig: worker count must be >= 1");
  solver.validate();
}

std::string_view to_string(SplitMethod m) {
  return m == SplitMethod::FixedStress ? "fs" : "pfs";
}

// ---------------------------------------------------------------------------

SplittingOperators::SplittingOperators(const ConstrainedSystem& system,
                                       const MaterialParams& params, const SplitConfig& cfg,
                                       double tau)
    : system_(&system), params_(params), cfg_(cfg), tau_(tau) {
  cfg_.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("SplittingOperators: time step must be positive");
  const auto start = Clock::now();
  const double storage = 1.0 / params.biot_modulus + cfg.stabilization;
  const auto flow = linear_combination(storage / tau, system.raw.pressure_mass, 1.0,
                                       system.raw.pressure_stiffness);
  flow_op_ = system.pressure_constraints.condense(flow);
  flow_solver_ = std::make_unique<SpdSolver>(flow_op_.matrix, cfg.solver);
  mechanics_solver_ = std::make_unique<SpdSolver>(system.mechanics.matrix, cfg.solver);
  setup_seconds_ = seconds_since(start);
}

std::vector<double> SplittingOperators::flow_step(int n, std::span<const double> p_prev,
                                                  std::span<const double> p_lag,
                                                  std::span<const double> p_lag_prev,
                                                  std::span<const double> u_lag,
                                                  std::span<const double> u_lag_prev) const {
  const auto& sys = system_->raw;
  const double alpha = params_.biot_coefficient;
  const double l = cfg_.stabilization;
  const double storage = 1.0 / params_.biot_modulus + l;
  const std::size_t np = p_prev.size();

  std::vector<double> weighted(np);
  for (std::size_t k = 0; k < np; ++k) {
    weighted[k] = storage / tau_ * p_prev[k] + l / tau_ * (p_lag[k] - p_lag_prev[k]);
  }
  auto rhs = spmv(sys.pressure_mass, weighted);
  if (alpha != 0.0) {
    const auto du = difference(u_lag, u_lag_prev);
    const auto div = spmv(sys.coupling, du);
    for (std::size_t k = 0; k < np; ++k) rhs[k] -= alpha / tau_ * div[k];
  }
  const auto f = sys.flow_source(n * tau_);
  for (std::size_t k = 0; k < np; ++k) rhs[k] += f[k];

  system_->pressure_constraints.condense_rhs(rhs, flow_op_.lift);
  auto p = flow_solver_->solve(rhs);
  system_->pressure_constraints.distribute(p);
  return p;
}

std::vector<double> SplittingOperators::mechanics_step(std::span<const double> p) const {
  const auto& sys = *system_;
  auto rhs = spmv_transpose(sys.raw.coupling, p);
  const double alpha = params_.biot_coefficient;
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = alpha * rhs[k] + sys.mechanics_rhs[k];
  sys.displacement_constraints.condense_rhs(rhs, sys.mechanics.lift);
  auto u = mechanics_solver_->solve(rhs);
  sys.displacement_constraints.distribute(u);
  return u;
}

// ---------------------------------------------------------------------------

void flow_sweep(const SplittingOperators& ops, const SpaceTimeState& lagged,
                SpaceTimeState& current) {
  current.p[0] = lagged.p[0];
  for (int n = 1; n <= lagged.steps; ++n) {
    try {
      current.p[n] = ops.flow_step(n, current.p[n - 1], lagged.p[n], lagged.p[n - 1], lagged.u[n],
                                   lagged.u[n - 1]);
    } catch (const SolverError& e) {
      throw SolverError("flow solve failed at time step " + std::to_string(n) + ": " + e.what(),
                        e.residual());
    }
  }
}

void mechanics_stage(const SplittingOperators& ops, SpaceTimeState& current, int workers) {
  const int steps = current.steps;
  workers = std::clamp(workers, 1, steps);
  std::vector<std::exception_ptr> errors(steps + 1);

  // Level n goes to worker (n-1) % workers; every slot is written by exactly
  // one thread.
  auto work = [&](int w) {
    for (int n = 1 + w; n <= steps; n += workers) {
      try {
        current.u[n] = ops.mechanics_step(current.p[n]);
      } catch (...) {
        errors[n] = std::current_exception();
      }
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  for (int n = 1; n <= steps; ++n) {
    if (!errors[n]) continue;
    try {
      std::rethrow_exception(errors[n]);
    } catch (const SolverError& e) {
      throw SolverError("mechanics solve failed at time step " + std::to_string(n) + ": " +
                            e.what(),
                        e.residual());
    }
  }
}

namespace {

void check_initial_guess(const ConstrainedSystem& system, const SpaceTimeState& guess) {
  if (guess.steps < 1 || static_cast<int>(guess.u.size()) != guess.steps + 1 ||
      static_cast<int>(guess.p.size()) != guess.steps + 1) {
    throw std::invalid_argument("split solve: malformed initial guess");
  }
  for (int n = 0; n <= guess.steps; ++n) {
    if (static_cast<int>(guess.u[n].size()) != system.dofs.num_displacement ||
        static_cast<int>(guess.p[n].size()) != system.dofs.num_pressure) {
      throw std::invalid_argument("split solve: initial guess does not match the dof map");
    }
  }
}

IterationReport start_report(SplitMethod method, const MaterialParams& params,
                             const SplitConfig& cfg) {
  IterationReport r;
  r.method = method;
  r.stabilization = cfg.stabilization;
  r.theoretical_rate = theoretical_rate(params, cfg.stabilization);
  if (cfg.stabilization < params.l_min()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "stabilization L = %.6e below the contraction threshold L_min = %.6e",
                  cfg.stabilization, params.l_min());
    r.warnings.emplace_back(buf);
  }
  return r;
}

}  // namespace

SplitResult pfs_solve(const ConstrainedSystem& system, const MaterialParams& params,
                      const SplitConfig& cfg, const SpaceTimeState& initial_guess) {
  check_initial_guess(system, initial_guess);
  SplitResult result{initial_guess, start_report(SplitMethod::ParallelFixedStress, params, cfg)};
  auto& report = result.report;
  const SplittingOperators ops(system, params, cfg, initial_guess.tau);
  report.factorizations = 2;
  report.setup_seconds = ops.setup_seconds();

  SpaceTimeState lagged = initial_guess;
  SpaceTimeState& current = result.state;
  const int steps = initial_guess.steps;

  try {
    for (int i = 1; i <= cfg.max_iter; ++i) {
      IterationRecord rec;
      rec.iteration = i;

      auto t0 = Clock::now();
      flow_sweep(ops, lagged, current);
      rec.flow_seconds = seconds_since(t0);

      t0 = Clock::now();
      mechanics_stage(ops, current, cfg.workers);
      rec.mechanics_seconds = seconds_since(t0);

      const auto s = increment_stats(ops, lagged, current, 1, steps);
      rec.increment_measure = s.measure;
      rec.increment_measure_l2 = s.measure_l2;
      rec.max_pressure_increment = s.max_dp;
      rec.max_displacement_increment = s.max_du;
      rec.criterion = s.criterion;
      if (i >= 2) {
        const auto& prev = report.iterations.back();
        rec.observed_rate = ratio(s.measure, prev.increment_measure);
        rec.observed_rate_l2 = ratio(s.measure_l2, prev.increment_measure_l2);
      }
      report.flow_seconds += rec.flow_seconds;
      report.mechanics_seconds += rec.mechanics_seconds;
      report.iterations.push_back(rec);
      report.iteration_count = i;

      if (s.criterion <= cfg.tol) {
        report.converged = true;
        break;
      }
      lagged = current;
    }
  } catch (const SolverError& e) {
    report.failure = e.what();
  }
  return result;
}

SplitResult fs_solve(const ConstrainedSystem& system, const MaterialParams& params,
                     const SplitConfig& cfg, const SpaceTimeState& initial_guess) {
  check_initial_guess(system, initial_guess);
  SplitResult result{initial_guess, start_report(SplitMethod::FixedStress, params, cfg)};
  auto& report = result.report;
  const SplittingOperators ops(system, params, cfg, initial_guess.tau);
  report.factorizations = 2;
  report.setup_seconds = ops.setup_seconds();

  auto& state = result.state;
  const int steps = initial_guess.steps;
  report.converged = true;

  for (int n = 1; n <= steps; ++n) {
    // Lagged iterate at level n; level n-1 is converged and fixed.
    std::vector<double> p_lag = state.p[n - 1];
    std::vector<double> u_lag = state.u[n - 1];
    double prev_measure = 0.0;
    double prev_measure_l2 = 0.0;
    bool step_converged = false;
    int i = 1;
    try {
      for (; i <= cfg.max_iter; ++i) {
        IterationRecord rec;
        rec.step = n;
        rec.iteration = i;

        auto t0 = Clock::now();
        auto p_new = ops.flow_step(n, state.p[n - 1], p_lag, state.p[n - 1], u_lag, state.u[n - 1]);
        rec.flow_seconds = seconds_since(t0);

        t0 = Clock::now();
        auto u_new = ops.mechanics_step(p_new);
        rec.mechanics_seconds = seconds_since(t0);

        const auto dp = difference(p_new, p_lag);
        const auto du = difference(u_new, u_lag);
        const double np = norm2(dp);
        const double nu = norm2(du);
        rec.max_pressure_increment = np;
        rec.max_displacement_increment = nu;
        rec.criterion = cfg.tol_p * np + cfg.tol_u * nu;
        rec.increment_measure = dot(dp, dp) / state.tau;
        rec.increment_measure_l2 = mass_norm_sq(system.raw.pressure_mass, dp) / state.tau;
        if (i >= 2) {
          rec.observed_rate = ratio(rec.increment_measure, prev_measure);
          rec.observed_rate_l2 = ratio(rec.increment_measure_l2, prev_measure_l2);
        }
        prev_measure = rec.increment_measure;
        prev_measure_l2 = rec.increment_measure_l2;
        report.flow_seconds += rec.flow_seconds;
        report.mechanics_seconds += rec.mechanics_seconds;
        report.iterations.push_back(rec);

        p_lag = std::move(p_new);
        u_lag = std::move(u_new);
        if (rec.criterion <= cfg.tol) {
          step_converged = true;
          break;
        }
      }
    } catch (const SolverError& e) {
      report.failure = "time step " + std::to_string(n) + ": " + e.what();
    }
    state.p[n] = std::move(p_lag);
    state.u[n] = std::move(u_lag);
    report.step_iterations.push_back(std::min(i, cfg.max_iter));
    if (!step_converged) {
      report.converged = false;
      report.failed_step = n;
      for (int m = n + 1; m <= steps; ++m) {
        state.p[m] = state.p[n];
        state.u[m] = state.u[n];
      }
      break;
    }
  }

  int total = 0;
  for (int c : report.step_iterations) total += c;
  report.iteration_count = total;
  report.mean_step_iterations =
      report.step_iterations.empty() ? 0.0 : static_cast<double>(total) / steps;
  return result;
}

SplitResult split_solve(SplitMethod method, const ConstrainedSystem& system,
                        const MaterialParams& params, const SplitConfig& cfg,
                        const SpaceTimeState& initial_guess) {
  return method == SplitMethod::FixedStress ? fs_solve(system, params, cfg, initial_guess)
                                            : pfs_solve(system, params, cfg, initial_guess);
}

double theoretical_rate(const MaterialParams& params, double stabilization) {
  if (!(stabilization >= 0.0)) throw std::invalid_argument("theoretical_rate: L must be >= 0");
  if (!(params.biot_modulus > 0.0)) throw std::invalid_argument("theoretical_rate: beta must be > 0");
  return stabilization / (1.0 / params.biot_modulus + stabilization);
}

std::optional<double> observed_rate(const IterationReport& report, int i) {
  if (report.method != SplitMethod::ParallelFixedStress) {
    throw std::invalid_argument("observed_rate: per-step rates of the sequential scheme live on "
                                "the iteration records");
  }
  if (i < 2 || i > static_cast<int>(report.iterations.size())) {
    throw std::out_of_range("observed_rate: iteration index out of range");
  }
  return ratio(report.iterations[i - 1].increment_measure,
               report.iterations[i - 2].increment_measure);
}

}  // namespace biotfs
