#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "biotfs/assembly.hpp"
#include "biotfs/mesh.hpp"
#include "biotfs/splitting.hpp"

namespace biotfs {

namespace units {
inline constexpr double darcy = 9.869233e-13;  // m^2
inline constexpr double centipoise = 1e-3;     // Pa s
}  // namespace units

/// Mandel's slab on the quarter domain [0,a]x[0,b] under a plate load F.
struct MandelParams {
  double a = 100.0;      // half-width [m]
  double b = 10.0;       // half-height [m]
  double force = 6.8e8;  // F [N/m]
  MaterialParams material;
  int series_terms = 200;
  double root_tol = 1e-14;

  void validate() const;
};

/// "fig3" (nu = 0.2, the configuration whose undrained ratio and diffusivity
/// match the benchmark table) and "nu0.4", "nu0.49", "nu0.499", "nu0.4999",
/// "nu0.49999". Throws std::invalid_argument for unknown names.
MandelParams mandel_preset(std::string_view name);
std::vector<std::string> mandel_preset_names();

/// Boundary table: x=0 and y=0 no-flux rollers, x=a drained and
/// traction-free, y=b no-flux rigid plate.
BoundaryTable mandel_boundary_table();
ProblemDef mandel_problem(const MandelParams& mp, int nx, int ny);

struct MandelInitialState {
  double pressure = 0.0;
  std::function<std::array<double, 2>(double x, double y)> displacement;
};

/// Undrained response right after loading: uniform pressure
/// F B (1+nu_u)/(3a) and the linear displacement field
/// (F nu_u x/(2Ga), -F (1-nu_u) y/(2Ga)).
MandelInitialState initial_conditions(const MandelParams& mp);

/// First `count` positive roots of tan(x) = ratio * x, root n in
/// (n pi, n pi + pi/2). Throws std::invalid_argument when ratio <= 1.
std::vector<double> find_series_roots(double ratio, int count, double root_tol = 1e-14);

/// Series solution of Mandel's problem with the roots computed once.
class MandelSolution {
 public:
  explicit MandelSolution(const MandelParams& mp);

  double pressure(double x, double t) const;
  std::array<double, 2> displacement(double x, double y, double t) const;
  /// Vertical displacement of the plate, u_y(x, b, t).
  double plate_displacement(double t) const { return displacement(0.0, params_.b, t)[1]; }
  double initial_pressure() const { return p0_; }
  const std::vector<double>& roots() const { return roots_; }
  const MandelParams& params() const { return params_; }

 private:
  MandelParams params_;
  std::vector<double> roots_;
  double p0_ = 0.0;
  double nu_ = 0.0;
  double nu_u_ = 0.0;
  double shear_ = 0.0;
  double diffusivity_ = 0.0;
};

double analytic_pressure(double x, double t, const MandelParams& mp);
std::array<double, 2> analytic_displacement(double x, double y, double t, const MandelParams& mp);

/// Pressure at (probe_x, 0) for every time level of the state.
std::vector<double> mandel_cryer_profile(const Mesh& mesh, const SpaceTimeState& state,
                                         double probe_x);

/// Ready-to-iterate Mandel setup: mesh, constrained operators, initial guess.
struct MandelSetup {
  MandelParams params;
  Mesh mesh;
  ConstrainedSystem system;
  SpaceTimeState initial_guess;
};

MandelSetup make_mandel_setup(const MandelParams& mp, int nx, int ny, int steps, double tau);

}  // namespace biotfs
