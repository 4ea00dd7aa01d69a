#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "biotfs/linalg.hpp"
#include "biotfs/mesh.hpp"

namespace biotfs {

/// Physical constants of the poroelastic medium, SI units throughout.
/// Derived quantities are computed on demand and never stored.
struct MaterialParams {
  double youngs_modulus = 0.0;    // E [Pa]
  double poisson_ratio = 0.0;     // nu
  double biot_coefficient = 1.0;  // alpha
  double biot_modulus = 0.0;      // beta [Pa]
  double permeability = 0.0;      // kappa [m^2]
  double viscosity = 0.0;         // mu_f [Pa s]
  double density = 0.0;           // rho [kg/m^3]
  double fluid_density = 0.0;     // rho_f [kg/m^3]
  double porosity = 0.0;
  std::array<double, 2> gravity{0.0, 0.0};  // [m/s^2]
  double skempton = 0.0;          // B

  static constexpr int dim = 2;

  double lame_lambda() const;
  double shear_modulus() const;
  /// lambda + 2G/d
  double drained_bulk_modulus() const;
  /// E / (3 (1 - 2 nu)), the three dimensional drained bulk modulus.
  double bulk_modulus_3d() const;
  double mobility() const { return permeability / viscosity; }
  /// alpha^2 / (2G/d + lambda)
  double l_phys() const;
  /// Smallest stabilization for which the splitting provably contracts.
  double l_min() const;
  double undrained_poisson_ratio() const;
  /// Consolidation coefficient c [m^2/s].
  double diffusivity() const;

  /// Throws std::invalid_argument when a constant is out of its physical range.
  void validate() const;
};

enum class FlowCondition { NoFlux, ZeroPressure };
enum class MechanicsCondition { TractionFree, ZeroNormalDisplacement, RigidPlate };

struct BoundaryCondition {
  FlowCondition flow = FlowCondition::NoFlux;
  MechanicsCondition mechanics = MechanicsCondition::TractionFree;
};

/// Boundary conditions indexed by BoundaryTag.
using BoundaryTable = std::array<BoundaryCondition, 4>;

inline const BoundaryCondition& condition(const BoundaryTable& t, BoundaryTag tag) {
  return t[static_cast<int>(tag)];
}

/// Geometry, boundary table and initial data of a consolidation problem.
struct ProblemDef {
  double width = 1.0;
  double height = 1.0;
  int nx = 1;
  int ny = 1;
  BoundaryTable boundary{};
  /// Downward force per unit depth carried by the rigid plate.
  double plate_force = 0.0;
  std::function<double(double x, double y)> initial_pressure;
  std::function<std::array<double, 2>(double x, double y)> initial_displacement;
};

// P2 support points are the mesh vertices followed by the edge midpoints.
inline int num_p2_nodes(const Mesh& m) { return static_cast<int>(m.num_nodes() + m.num_edges()); }
inline int num_displacement_dofs(const Mesh& m) { return 2 * num_p2_nodes(m); }
inline int num_pressure_dofs(const Mesh& m) { return static_cast<int>(m.num_nodes()); }
inline int displacement_dof(int p2_node, int component) { return 2 * p2_node + component; }

Point p2_node_coordinates(const Mesh& mesh, int p2_node);
/// The six global P2 node indices of a triangle in local order.
std::array<int, 6> p2_element_nodes(const Mesh& mesh, int triangle);

struct DofMap {
  int num_displacement = 0;
  int num_pressure = 0;
  std::vector<int> pressure_dirichlet;
  std::vector<int> displacement_dirichlet;
  /// Every tied dof including the master.
  std::vector<int> tie_dofs;
  int tie_master = -1;

  bool has_tie() const { return !tie_dofs.empty(); }
};

/// Throws std::logic_error naming the dof when one dof receives two
/// incompatible conditions.
DofMap build_dof_map(const Mesh& mesh, const BoundaryTable& boundary);
inline DofMap build_dof_map(const Mesh& mesh, const ProblemDef& problem) {
  return build_dof_map(mesh, problem.boundary);
}

/// Operator with constraints folded in, plus the lifting of nonzero
/// Dirichlet values that has to be moved to the right-hand side.
struct ConstrainedOperator {
  SparseMatrixCSR matrix;
  std::vector<double> lift;
};

/**
 * Homogeneous-size constraint handling: Dirichlet dofs become identity rows,
 * tied dofs are folded into their master (slave rows become identity too).
 * All vectors keep their full length, distribute() restores slave and
 * Dirichlet entries after a solve.
 */
class ConstraintSet {
 public:
  ConstraintSet() = default;
  explicit ConstraintSet(int size);

  /// Throws std::logic_error when the dof is already tied.
  void add_dirichlet(int dof, double value = 0.0);
  /// Ties every dof of the group to `master`, which must be one of them.
  /// Throws std::logic_error when a dof is already constrained.
  void add_tie(std::span<const int> dofs, int master);

  int size() const { return static_cast<int>(kind_.size()); }
  bool is_dirichlet(int dof) const { return kind_[dof] == Kind::Dirichlet; }
  bool is_slave(int dof) const { return kind_[dof] == Kind::Slave; }
  int master_of(int dof) const { return master_[dof]; }

  ConstrainedOperator condense(const SparseMatrixCSR& a) const;
  void condense_rhs(std::span<double> b, std::span<const double> lift) const;
  void distribute(std::span<double> x) const;

 private:
  enum class Kind : unsigned char { Free, Dirichlet, Slave, Master };
  std::vector<Kind> kind_;
  std::vector<int> master_;
  std::vector<double> value_;
  std::vector<int> slaves_;
};

/// Semidiscrete operators of the two-field model. The Biot coefficient and
/// the storage 1/beta are not applied to the coupling and mass blocks.
struct BiotSystem {
  SparseMatrixCSR elasticity;          // A
  SparseMatrixCSR coupling;            // Bc, (div phi_j, psi_i), pressure rows
  SparseMatrixCSR pressure_stiffness;  // C, weighted by kappa/mu_f
  SparseMatrixCSR pressure_mass;       // M_p
  std::vector<double> mechanics_load;  // (rho g, v)
  std::vector<double> flow_load;       // (kappa/mu_f rho_f g, grad q)
  /// Optional source f(t) returned as a pressure load vector; empty means zero.
  std::function<std::vector<double>(double t)> source;

  std::vector<double> flow_source(double t) const;
};

SparseMatrixCSR assemble_elasticity(const Mesh& mesh, const MaterialParams& params);
SparseMatrixCSR assemble_coupling(const Mesh& mesh);
SparseMatrixCSR assemble_pressure_stiffness(const Mesh& mesh, const MaterialParams& params);
SparseMatrixCSR assemble_pressure_mass(const Mesh& mesh);
std::vector<double> assemble_body_force(const Mesh& mesh, const MaterialParams& params);
std::vector<double> assemble_flow_gravity(const Mesh& mesh, const MaterialParams& params);
BiotSystem assemble_system(const Mesh& mesh, const MaterialParams& params);

/// Operators ready for the splitting drivers.
struct ConstrainedSystem {
  BiotSystem raw;
  DofMap dofs;
  ConstraintSet displacement_constraints;
  ConstraintSet pressure_constraints;
  ConstrainedOperator mechanics;
  /// Unconstrained mechanics right-hand side without the pressure term:
  /// body force plus the plate force on the master dof.
  std::vector<double> mechanics_rhs;
};

/// plate_force is the downward force magnitude F; the master dof receives -F.
ConstrainedSystem apply_constraints(BiotSystem system, const DofMap& dofs, double plate_force);

std::vector<double> interpolate_displacement(
    const Mesh& mesh, const std::function<std::array<double, 2>(double, double)>& field);
std::vector<double> interpolate_pressure(const Mesh& mesh,
                                         const std::function<double(double, double)>& field);

/// Finite element evaluation at a point; throws std::out_of_range outside.
double evaluate_pressure(const Mesh& mesh, std::span<const double> p, double x, double y);
std::array<double, 2> evaluate_displacement(const Mesh& mesh, std::span<const double> u, double x,
                                            double y);

}  // namespace biotfs
