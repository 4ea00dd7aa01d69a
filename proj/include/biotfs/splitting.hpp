#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "biotfs/assembly.hpp"
#include "biotfs/linalg.hpp"

namespace biotfs {

/// Displacement and pressure coefficients at every time level 0..N.
struct SpaceTimeState {
  std::vector<std::vector<double>> u;
  std::vector<std::vector<double>> p;
  double tau = 0.0;
  int steps = 0;

  /// Every level set to (u0, p0).
  static SpaceTimeState constant(std::vector<double> u0, std::vector<double> p0, int steps,
                                 double tau);
  double time(int n) const { return n * tau; }
};

struct SplitConfig {
  double stabilization = 0.0;  // L [1/Pa]
  double tol_p = 1e-8;
  double tol_u = 1e2;
  double tol = 1e-8;
  int max_iter = 500;
  int workers = 1;
  SolverConfig solver{};

  void validate() const;
};

enum class SplitMethod { FixedStress, ParallelFixedStress };

std::string_view to_string(SplitMethod m);

struct IterationRecord {
  int step = 0;  // time level for the sequential scheme, 0 for the space-time one
  int iteration = 0;
  /// sum_n tau |(dp^n - dp^{n-1})/tau|^2 with Euclidean coefficient norms.
  double increment_measure = 0.0;
  /// Same quantity measured in the pressure mass matrix norm.
  double increment_measure_l2 = 0.0;
  std::optional<double> observed_rate;
  std::optional<double> observed_rate_l2;
  double max_pressure_increment = 0.0;
  double max_displacement_increment = 0.0;
  double criterion = 0.0;
  double flow_seconds = 0.0;
  double mechanics_seconds = 0.0;
};

struct IterationReport {
  SplitMethod method = SplitMethod::ParallelFixedStress;
  double stabilization = 0.0;
  double theoretical_rate = 0.0;
  std::vector<IterationRecord> iterations;
  /// Global iterations (space-time scheme) or total over all steps (sequential).
  int iteration_count = 0;
  /// Sequential scheme only: iterations spent at each step n = 1..N.
  std::vector<int> step_iterations;
  double mean_step_iterations = 0.0;
  bool converged = false;
  int failed_step = -1;
  std::string failure;
  int factorizations = 0;
  double setup_seconds = 0.0;
  double flow_seconds = 0.0;
  double mechanics_seconds = 0.0;
  std::vector<std::string> warnings;
};

struct SplitResult {
  SpaceTimeState state;
  IterationReport report;
};

/**
 * Operators shared by every flow and mechanics solve of one run: the flow
 * matrix (1/beta + L)/tau M_p + C and the elasticity matrix, each constrained
 * and factorized once.
 */
class SplittingOperators {
 public:
  SplittingOperators(const ConstrainedSystem& system, const MaterialParams& params,
                     const SplitConfig& cfg, double tau);

  const ConstrainedSystem& system() const { return *system_; }
  const MaterialParams& params() const { return params_; }
  const SplitConfig& config() const { return cfg_; }
  double tau() const { return tau_; }
  double setup_seconds() const { return setup_seconds_; }

  /**
   * Pressure at level n from
   *   [(1/beta+L)/tau M + C] p = (1/beta+L)/tau M p_prev
   *       - alpha/tau Bc (u_lag - u_lag_prev) + L/tau M (p_lag - p_lag_prev) + f^n
   * where p_prev is the current iterate at level n-1 and the *_lag fields
   * come from the previous iteration.
   */
  std::vector<double> flow_step(int n, std::span<const double> p_prev,
                                std::span<const double> p_lag, std::span<const double> p_lag_prev,
                                std::span<const double> u_lag,
                                std::span<const double> u_lag_prev) const;

  /// Solves A u = alpha Bc^T p + g with the plate constraint active.
  std::vector<double> mechanics_step(std::span<const double> p) const;

 private:
  const ConstrainedSystem* system_;
  MaterialParams params_;
  SplitConfig cfg_;
  double tau_;
  ConstrainedOperator flow_op_;
  std::unique_ptr<SpdSolver> flow_solver_;
  std::unique_ptr<SpdSolver> mechanics_solver_;
  double setup_seconds_ = 0.0;
};

/// Step 1 of the space-time scheme: sequential sweep n = 1..N writing
/// current.p. current.p[0] is copied from the lagged state.
void flow_sweep(const SplittingOperators& ops, const SpaceTimeState& lagged,
                SpaceTimeState& current);

/// Step 2: the N elliptic solves, distributed over `workers` threads. The
/// result does not depend on the worker count.
void mechanics_stage(const SplittingOperators& ops, SpaceTimeState& current, int workers);

SplitResult pfs_solve(const ConstrainedSystem& system, const MaterialParams& params,
                      const SplitConfig& cfg, const SpaceTimeState& initial_guess);

/// Time-marching fixed-stress scheme. Each step starts from the converged
/// previous level; only level 0 of initial_guess is used.
SplitResult fs_solve(const ConstrainedSystem& system, const MaterialParams& params,
                     const SplitConfig& cfg, const SpaceTimeState& initial_guess);

SplitResult split_solve(SplitMethod method, const ConstrainedSystem& system,
                        const MaterialParams& params, const SplitConfig& cfg,
                        const SpaceTimeState& initial_guess);

/// L / (1/beta + L)
double theoretical_rate(const MaterialParams& params, double stabilization);

/// Ratio of the increment measures of iterations i and i-1 (1-based) of a
/// space-time run; empty when the denominator vanishes (already converged).
/// Throws std::out_of_range for i < 2 or i beyond the recorded iterations.
std::optional<double> observed_rate(const IterationReport& report, int i);

}  // namespace biotfs
