#include "biotfs/mandel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace biotfs {

void MandelParams::validate() const {
  if (!(a > 0.0 && b > 0.0 && force > 0.0)) {
    throw std::invalid_argument("MandelParams: a, b and F must be positive");
  }
  if (series_terms < 50) throw std::invalid_argument("MandelParams: need at least 50 series terms");
  if (!(root_tol > 0.0 && root_tol <= 1e-12)) {
    throw std::invalid_argument("MandelParams: root tolerance must lie in (0, 1e-12]");
  }
  material.validate();
  if (!(material.skempton > 0.0)) throw std::invalid_argument("MandelParams: need B > 0");
}

namespace {

MaterialParams benchmark_material(double poisson_ratio) {
  MaterialParams m;
  m.youngs_modulus = 5.94e9;
  m.poisson_ratio = poisson_ratio;
  m.biot_coefficient = 1.0;
  m.biot_modulus = 1.65e10;
  m.permeability = 100.0 * units::darcy;
  m.viscosity = 10.0 * units::centipoise;
  m.skempton = 0.83333;
  return m;
}

struct Preset {
  const char* name;
  double poisson_ratio;
};

constexpr Preset kPresets[] = {
    {"fig3", 0.2},       {"nu0.4", 0.4},       {"nu0.49", 0.49},
    {"nu0.499", 0.499},  {"nu0.4999", 0.4999}, {"nu0.49999", 0.49999},
};

}  // namespace

MandelParams mandel_preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (name == p.name) {
      MandelParams mp;
      mp.material = benchmark_material(p.poisson_ratio);
      return mp;
    }
  }
  throw std::invalid_argument("unknown Mandel preset '" + std::string(name) + "'");
}

std::vector<std::string> mandel_preset_names() {
  std::vector<std::string> names;
  for (const auto& p : kPresets) names.emplace_back(p.name);
  return names;
}

BoundaryTable mandel_boundary_table() {
  BoundaryTable t;
  t[static_cast<int>(BoundaryTag::Left)] = {FlowCondition::NoFlux,
                                            MechanicsCondition::ZeroNormalDisplacement};
  t[static_cast<int>(BoundaryTag::Bottom)] = {FlowCondition::NoFlux,
                                              MechanicsCondition::ZeroNormalDisplacement};
  t[static_cast<int>(BoundaryTag::Right)] = {FlowCondition::ZeroPressure,
                                             MechanicsCondition::TractionFree};
  t[static_cast<int>(BoundaryTag::Top)] = {FlowCondition::NoFlux, MechanicsCondition::RigidPlate};
  return t;
}

MandelInitialState initial_conditions(const MandelParams& mp) {
  const auto& m = mp.material;
  const double nu_u = m.undrained_poisson_ratio();
  const double g = m.shear_modulus();
  const double f = mp.force;
  const double a = mp.a;
  MandelInitialState s;
  s.pressure = f * m.skempton * (1.0 + nu_u) / (3.0 * a);
  s.displacement = [=](double x, double y) -> std::array<double, 2> {
    return {f * nu_u * x / (2.0 * g * a), -f * (1.0 - nu_u) * y / (2.0 * g * a)};
  };
  return s;
}

ProblemDef mandel_problem(const MandelParams& mp, int nx, int ny) {
  mp.validate();
  ProblemDef def;
  def.width = mp.a;
  def.height = mp.b;
  def.nx = nx;
  def.ny = ny;
  def.boundary = mandel_boundary_table();
  def.plate_force = mp.force;
  const auto ic = initial_conditions(mp);
  def.initial_pressure = [p0 = ic.pressure](double, double) { return p0; };
  def.initial_displacement = ic.displacement;
  return def;
}

std::vector<double> find_series_roots(double ratio, int count, double root_tol) {
  if (!(ratio > 1.0)) {
    throw std::invalid_argument("find_series_roots: ratio must exceed 1 for a root in (0, pi/2)");
  }
  if (count < 0) throw std::invalid_argument("find_series_roots: negative count");
  constexpr double pi = std::numbers::pi;
  // sin(x) - ratio x cos(x) has the roots of tan(x) = ratio x without the poles.
  auto g = [ratio](double x) { return std::sin(x) - ratio * x * std::cos(x); };

  std::vector<double> roots;
  roots.reserve(count);
  for (int n = 0; n < count; ++n) {
    double lo = n * pi;
    double hi = n * pi + 0.5 * pi;
    // g is negative just right of n pi when n is even and positive when odd.
    const bool left_negative = (n % 2 == 0);
    for (int it = 0; it < 200 && hi - lo > root_tol * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const bool mid_negative = g(mid) < 0.0;
      if (mid_negative == left_negative) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double root = 0.5 * (lo + hi);
    if (!(root > n * pi && root < n * pi + 0.5 * pi) ||
        std::abs(g(root)) > 1e-9 * (1.0 + ratio * root)) {
      throw std::runtime_error("find_series_roots: bracketing failed for root " + std::to_string(n));
    }
    roots.push_back(root);
  }
  return roots;
}

MandelSolution::MandelSolution(const MandelParams& mp) : params_(mp) {
  mp.validate();
  const auto& m = mp.material;
  nu_ = m.poisson_ratio;
  nu_u_ = m.undrained_poisson_ratio();
  shear_ = m.shear_modulus();
  diffusivity_ = m.diffusivity();
  p0_ = initial_conditions(mp).pressure;
  roots_ = find_series_roots((1.0 - nu_) / (nu_u_ - nu_), mp.series_terms, mp.root_tol);
}

double MandelSolution::pressure(double x, double t) const {
  const double a = params_.a;
  double sum = 0.0;
  for (double r : roots_) {
    const double s = std::sin(r);
    const double c = std::cos(r);
    const double decay = std::exp(-r * r * diffusivity_ * t / (a * a));
    sum += s / (r - s * c) * (std::cos(r * x / a) - c) * decay;
  }
  return 2.0 * p0_ * sum;
}

std::array<double, 2> MandelSolution::displacement(double x, double y, double t) const {
  const double a = params_.a;
  const double f = params_.force;
  const double g = shear_;
  double s1 = 0.0;  // sum sin cos / (r - sin cos) e
  double s2 = 0.0;  // sum cos / (r - sin cos) sin(r x / a) e
  for (double r : roots_) {
    const double s = std::sin(r);
    const double c = std::cos(r);
    const double decay = std::exp(-r * r * diffusivity_ * t / (a * a));
    const double den = r - s * c;
    s1 += s * c / den * decay;
    s2 += c / den * std::sin(r * x / a) * decay;
  }
  const double ux = (f * nu_ / (2.0 * g * a) - f * nu_u_ / (g * a) * s1) * x + f / g * s2;
  const double uy = (-f * (1.0 - nu_) / (2.0 * g * a) + f * (1.0 - nu_u_) / (g * a) * s1) * y;
  return {ux, uy};
}

double analytic_pressure(double x, double t, const MandelParams& mp) {
  return MandelSolution(mp).pressure(x, t);
}

std::array<double, 2> analytic_displacement(double x, double y, double t, const MandelParams& mp) {
  return MandelSolution(mp).displacement(x, y, t);
}

std::vector<double> mandel_cryer_profile(const Mesh& mesh, const SpaceTimeState& state,
                                         double probe_x) {
  if (!mesh.locate(probe_x, 0.0)) {
    throw std::out_of_range("mandel_cryer_profile: probe outside the domain");
  }
  std::vector<double> values;
  values.reserve(state.p.size());
  for (const auto& p : state.p) values.push_back(evaluate_pressure(mesh, p, probe_x, 0.0));
  return values;
}

MandelSetup make_mandel_setup(const MandelParams& mp, int nx, int ny, int steps, double tau) {
  const auto def = mandel_problem(mp, nx, ny);
  Mesh mesh = build_rect(def.width, def.height, nx, ny);
  const auto dofs = build_dof_map(mesh, def);
  auto system = apply_constraints(assemble_system(mesh, mp.material), dofs, def.plate_force);
  auto u0 = interpolate_displacement(mesh, def.initial_displacement);
  auto p0 = interpolate_pressure(mesh, def.initial_pressure);
  auto guess = SpaceTimeState::constant(std::move(u0), std::move(p0), steps, tau);
  return {mp, std::move(mesh), std::move(system), std::move(guess)};
}

}  // namespace biotfs
