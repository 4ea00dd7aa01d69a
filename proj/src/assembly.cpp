#include "biotfs/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "biotfs/element.hpp"

namespace biotfs {

// ---------------------------------------------------------------------------
// Material constants

double MaterialParams::lame_lambda() const {
  const double nu = poisson_ratio;
  return youngs_modulus * nu / ((1.0 - 2.0 * nu) * (1.0 + nu));
}

double MaterialParams::shear_modulus() const { return youngs_modulus / (2.0 + 2.0 * poisson_ratio); }

double MaterialParams::drained_bulk_modulus() const {
  return lame_lambda() + 2.0 * shear_modulus() / dim;
}

double MaterialParams::bulk_modulus_3d() const {
  return youngs_modulus / (3.0 * (1.0 - 2.0 * poisson_ratio));
}

double MaterialParams::l_phys() const {
  return biot_coefficient * biot_coefficient / drained_bulk_modulus();
}

double MaterialParams::l_min() const {
  return biot_coefficient * biot_coefficient / (2.0 * drained_bulk_modulus());
}

double MaterialParams::undrained_poisson_ratio() const {
  const double nu = poisson_ratio;
  const double b = skempton;
  return (3.0 * nu + b * (1.0 - 2.0 * nu)) / (3.0 - b * (1.0 - 2.0 * nu));
}

double MaterialParams::diffusivity() const {
  const double alpha = biot_coefficient;
  const double g = shear_modulus();
  return mobility() / (1.0 / biot_modulus + alpha * alpha / (bulk_modulus_3d() + 4.0 * g / 3.0));
}

void MaterialParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("MaterialParams: ") + what);
  };
  require(youngs_modulus > 0.0, "Young's modulus must be positive");
  require(poisson_ratio > 0.0 && poisson_ratio < 0.5, "Poisson ratio must lie in (0, 0.5)");
  require(biot_coefficient >= 0.0 && biot_coefficient <= 1.0, "Biot coefficient must lie in [0, 1]");
  require(biot_modulus > 0.0, "Biot modulus must be positive");
  require(permeability > 0.0, "permeability must be positive");
  require(viscosity > 0.0, "viscosity must be positive");
  require(skempton >= 0.0 && skempton <= 1.0, "Skempton coefficient must lie in [0, 1]");
  require(density >= 0.0 && fluid_density >= 0.0, "densities must be non-negative");
  require(porosity >= 0.0 && porosity < 1.0, "porosity must lie in [0, 1)");
}

// ---------------------------------------------------------------------------
// Degrees of freedom

Point p2_node_coordinates(const Mesh& mesh, int p2_node) {
  const int nv = static_cast<int>(mesh.num_nodes());
  if (p2_node < nv) return mesh.nodes()[p2_node];
  return mesh.midpoint(p2_node - nv);
}

std::array<int, 6> p2_element_nodes(const Mesh& mesh, int triangle) {
  const int nv = static_cast<int>(mesh.num_nodes());
  const auto& t = mesh.triangles()[triangle];
  const auto& e = mesh.triangle_edges()[triangle];
  return {t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]};
}

namespace {

int normal_component(BoundaryTag tag) {
  return (tag == BoundaryTag::Left || tag == BoundaryTag::Right) ? 0 : 1;
}

// P2 nodes on a side: its vertices and the midpoints of its edges.
std::vector<int> p2_boundary_nodes(const Mesh& mesh, BoundaryTag tag) {
  std::vector<int> nodes = boundary_nodes(mesh, tag);
  const int nv = static_cast<int>(mesh.num_nodes());
  for (const auto& be : mesh.boundary_edges()) {
    if (be.tag == tag) nodes.push_back(nv + be.edge);
  }
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

void sort_unique(std::vector<int>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

DofMap build_dof_map(const Mesh& mesh, const BoundaryTable& boundary) {
  DofMap map;
  map.num_displacement = num_displacement_dofs(mesh);
  map.num_pressure = num_pressure_dofs(mesh);

  int plate_sides = 0;
  for (BoundaryTag tag :
       {BoundaryTag::Left, BoundaryTag::Bottom, BoundaryTag::Right, BoundaryTag::Top}) {
    const auto& bc = condition(boundary, tag);
    if (bc.flow == FlowCondition::ZeroPressure) {
      for (int v : boundary_nodes(mesh, tag)) map.pressure_dirichlet.push_back(v);
    }
    const int comp = normal_component(tag);
    switch (bc.mechanics) {
      case MechanicsCondition::TractionFree:
        break;
      case MechanicsCondition::ZeroNormalDisplacement:
        for (int n : p2_boundary_nodes(mesh, tag)) {
          map.displacement_dirichlet.push_back(displacement_dof(n, comp));
        }
        break;
      case MechanicsCondition::RigidPlate:
        ++plate_sides;
        if (plate_sides > 1) {
          throw std::logic_error("build_dof_map: only one rigid plate side is supported");
        }
        for (int n : p2_boundary_nodes(mesh, tag)) {
          map.tie_dofs.push_back(displacement_dof(n, comp));
        }
        break;
    }
  }
  sort_unique(map.pressure_dirichlet);
  sort_unique(map.displacement_dirichlet);
  sort_unique(map.tie_dofs);

  for (int d : map.tie_dofs) {
    if (std::binary_search(map.displacement_dirichlet.begin(), map.displacement_dirichlet.end(), d)) {
      throw std::logic_error("build_dof_map: displacement dof " + std::to_string(d) +
                             " is both fixed and tied to the plate");
    }
  }
  if (!map.tie_dofs.empty()) map.tie_master = map.tie_dofs.front();
  return map;
}

// ---------------------------------------------------------------------------
// Constraints

ConstraintSet::ConstraintSet(int size)
    : kind_(size, Kind::Free), master_(size, -1), value_(size, 0.0) {}

void ConstraintSet::add_dirichlet(int dof, double value) {
  if (kind_.at(dof) == Kind::Slave || kind_[dof] == Kind::Master) {
    throw std::logic_error("ConstraintSet: dof " + std::to_string(dof) +
                           " is tied and cannot also be fixed");
  }
  if (kind_[dof] == Kind::Dirichlet && value_[dof] != value) {
    throw std::logic_error("ConstraintSet: dof " + std::to_string(dof) +
                           " fixed to two different values");
  }
  kind_[dof] = Kind::Dirichlet;
  value_[dof] = value;
}

void ConstraintSet::add_tie(std::span<const int> dofs, int master) {
  if (std::find(dofs.begin(), dofs.end(), master) == dofs.end()) {
    throw std::logic_error("ConstraintSet: tie master must belong to the tied group");
  }
  for (int d : dofs) {
    if (kind_.at(d) != Kind::Free) {
      throw std::logic_error("ConstraintSet: dof " + std::to_string(d) + " is already constrained");
    }
  }
  for (int d : dofs) {
    master_[d] = master;
    if (d == master) {
      kind_[d] = Kind::Master;
    } else {
      kind_[d] = Kind::Slave;
      slaves_.push_back(d);
    }
  }
}

ConstrainedOperator ConstraintSet::condense(const SparseMatrixCSR& a) const {
  if (a.rows() != size() || a.cols() != size()) {
    throw std::invalid_argument("ConstraintSet::condense: size mismatch");
  }
  ConstrainedOperator out;
  out.lift.assign(size(), 0.0);
  std::vector<Triplet> t;
  t.reserve(a.nnz() + size());
  const auto& ptr = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (int i = 0; i < size(); ++i) {
    if (kind_[i] == Kind::Dirichlet) continue;
    const int row = kind_[i] == Kind::Slave ? master_[i] : i;
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) {
      const int j = col[k];
      if (kind_[j] == Kind::Dirichlet) {
        out.lift[row] += val[k] * value_[j];
        continue;
      }
      const int column = kind_[j] == Kind::Slave ? master_[j] : j;
      t.push_back({row, column, val[k]});
    }
  }
  for (int i = 0; i < size(); ++i) {
    if (kind_[i] == Kind::Dirichlet || kind_[i] == Kind::Slave) t.push_back({i, i, 1.0});
  }
  out.matrix = SparseMatrixCSR::from_triplets(size(), size(), t);
  return out;
}

void ConstraintSet::condense_rhs(std::span<double> b, std::span<const double> lift) const {
  if (static_cast<int>(b.size()) != size()) {
    throw std::invalid_argument("ConstraintSet::condense_rhs: size mismatch");
  }
  for (int s : slaves_) {
    b[master_[s]] += b[s];
    b[s] = 0.0;
  }
  for (int i = 0; i < size(); ++i) {
    if (kind_[i] == Kind::Dirichlet) {
      b[i] = value_[i];
    } else if (!lift.empty()) {
      b[i] -= lift[i];
    }
  }
}

void ConstraintSet::distribute(std::span<double> x) const {
  for (int s : slaves_) x[s] = x[master_[s]];
  for (int i = 0; i < size(); ++i) {
    if (kind_[i] == Kind::Dirichlet) x[i] = value_[i];
  }
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

Triangle triangle_points(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles()[t];
  return {mesh.nodes()[tri[0]], mesh.nodes()[tri[1]], mesh.nodes()[tri[2]]};
}

template <class Kernel>
auto element_or_throw(int t, Kernel&& kernel) {
  try {
    return kernel();
  } catch (const std::domain_error& e) {
    throw std::domain_error("element " + std::to_string(t) + ": " + e.what());
  }
}

}  // namespace

SparseMatrixCSR assemble_elasticity(const Mesh& mesh, const MaterialParams& params) {
  const double g = params.shear_modulus();
  const double lambda = params.lame_lambda();
  const int n = num_displacement_dofs(mesh);
  std::vector<Triplet> t;
  t.reserve(mesh.num_triangles() * 144);
  for (int e = 0; e < static_cast<int>(mesh.num_triangles()); ++e) {
    const auto ke = element_or_throw(
        e, [&] { return p2_elasticity_element(triangle_points(mesh, e), g, lambda); });
    const auto nodes = p2_element_nodes(mesh, e);
    for (int a = 0; a < 12; ++a) {
      const int ga = displacement_dof(nodes[a / 2], a % 2);
      for (int b = 0; b < 12; ++b) {
        t.push_back({ga, displacement_dof(nodes[b / 2], b % 2), ke[a][b]});
      }
    }
  }
  return SparseMatrixCSR::from_triplets(n, n, t);
}

SparseMatrixCSR assemble_coupling(const Mesh& mesh) {
  const int nu = num_displacement_dofs(mesh);
  const int np = num_pressure_dofs(mesh);
  std::vector<Triplet> t;
  t.reserve(mesh.num_triangles() * 36);
  for (int e = 0; e < static_cast<int>(mesh.num_triangles()); ++e) {
    const auto be =
        element_or_throw(e, [&] { return p2p1_divergence_element(triangle_points(mesh, e)); });
    const auto nodes = p2_element_nodes(mesh, e);
    const auto& verts = mesh.triangles()[e];
    for (int i = 0; i < 3; ++i) {
      for (int b = 0; b < 12; ++b) {
        t.push_back({verts[i], displacement_dof(nodes[b / 2], b % 2), be[i][b]});
      }
    }
  }
  return SparseMatrixCSR::from_triplets(np, nu, t);
}

namespace {

template <class Kernel>
SparseMatrixCSR assemble_p1(const Mesh& mesh, Kernel&& kernel) {
  const int np = num_pressure_dofs(mesh);
  std::vector<Triplet> t;
  t.reserve(mesh.num_triangles() * 9);
  for (int e = 0; e < static_cast<int>(mesh.num_triangles()); ++e) {
    const auto me = element_or_throw(e, [&] { return kernel(triangle_points(mesh, e)); });
    const auto& verts = mesh.triangles()[e];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) t.push_back({verts[i], verts[j], me[i][j]});
    }
  }
  return SparseMatrixCSR::from_triplets(np, np, t);
}

}  // namespace

SparseMatrixCSR assemble_pressure_stiffness(const Mesh& mesh, const MaterialParams& params) {
  const double k = params.mobility();
  return assemble_p1(mesh, [k](const Triangle& tri) { return p1_stiffness_element(tri, k); });
}

SparseMatrixCSR assemble_pressure_mass(const Mesh& mesh) {
  return assemble_p1(mesh, [](const Triangle& tri) { return p1_mass_element(tri); });
}

std::vector<double> assemble_body_force(const Mesh& mesh, const MaterialParams& params) {
  std::vector<double> f(num_displacement_dofs(mesh), 0.0);
  const double fx = params.density * params.gravity[0];
  const double fy = params.density * params.gravity[1];
  if (fx == 0.0 && fy == 0.0) return f;
  for (int e = 0; e < static_cast<int>(mesh.num_triangles()); ++e) {
    const auto geo = element_or_throw(e, [&] { return triangle_geometry(triangle_points(mesh, e)); });
    const auto nodes = p2_element_nodes(mesh, e);
    for (const auto& q : gauss6()) {
      const auto phi = p2_values(q.bary);
      for (int a = 0; a < 6; ++a) {
        f[displacement_dof(nodes[a], 0)] += q.weight * geo.area * fx * phi[a];
        f[displacement_dof(nodes[a], 1)] += q.weight * geo.area * fy * phi[a];
      }
    }
  }
  return f;
}

std::vector<double> assemble_flow_gravity(const Mesh& mesh, const MaterialParams& params) {
  std::vector<double> f(num_pressure_dofs(mesh), 0.0);
  const double gx = params.mobility() * params.fluid_density * params.gravity[0];
  const double gy = params.mobility() * params.fluid_density * params.gravity[1];
  if (gx == 0.0 && gy == 0.0) return f;
  for (int e = 0; e < static_cast<int>(mesh.num_triangles()); ++e) {
    const auto geo = element_or_throw(e, [&] { return triangle_geometry(triangle_points(mesh, e)); });
    const auto& verts = mesh.triangles()[e];
    for (int i = 0; i < 3; ++i) {
      f[verts[i]] += geo.area * (gx * geo.grad_bary[i].x + gy * geo.grad_bary[i].y);
    }
  }
  return f;
}

std::vector<double> BiotSystem::flow_source(double t) const {
  std::vector<double> f = flow_load;
  if (source) {
    const auto s = source(t);
    if (s.size() != f.size()) throw std::invalid_argument("BiotSystem: source has wrong size");
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += s[i];
  }
  return f;
}

BiotSystem assemble_system(const Mesh& mesh, const MaterialParams& params) {
  params.validate();
  BiotSystem sys;
  sys.elasticity = assemble_elasticity(mesh, params);
  sys.coupling = assemble_coupling(mesh);
  sys.pressure_stiffness = assemble_pressure_stiffness(mesh, params);
  sys.pressure_mass = assemble_pressure_mass(mesh);
  sys.mechanics_load = assemble_body_force(mesh, params);
  sys.flow_load = assemble_flow_gravity(mesh, params);
  return sys;
}

ConstrainedSystem apply_constraints(BiotSystem system, const DofMap& dofs, double plate_force) {
  ConstrainedSystem out;
  out.dofs = dofs;
  out.displacement_constraints = ConstraintSet(dofs.num_displacement);
  for (int d : dofs.displacement_dirichlet) out.displacement_constraints.add_dirichlet(d);
  if (dofs.has_tie()) out.displacement_constraints.add_tie(dofs.tie_dofs, dofs.tie_master);

  out.pressure_constraints = ConstraintSet(dofs.num_pressure);
  for (int d : dofs.pressure_dirichlet) out.pressure_constraints.add_dirichlet(d);

  out.mechanics = out.displacement_constraints.condense(system.elasticity);
  out.mechanics_rhs = system.mechanics_load;
  if (plate_force != 0.0) {
    if (!dofs.has_tie()) {
      throw std::logic_error("apply_constraints: plate force given but no plate side defined");
    }
    out.mechanics_rhs[dofs.tie_master] -= plate_force;
  }
  out.raw = std::move(system);
  return out;
}

// ---------------------------------------------------------------------------
// Interpolation and evaluation

std::vector<double> interpolate_displacement(
    const Mesh& mesh, const std::function<std::array<double, 2>(double, double)>& field) {
  const int n = num_p2_nodes(mesh);
  std::vector<double> u(2 * n);
  for (int k = 0; k < n; ++k) {
    const Point p = p2_node_coordinates(mesh, k);
    const auto v = field(p.x, p.y);
    u[displacement_dof(k, 0)] = v[0];
    u[displacement_dof(k, 1)] = v[1];
  }
  return u;
}

std::vector<double> interpolate_pressure(const Mesh& mesh,
                                         const std::function<double(double, double)>& field) {
  std::vector<double> p(mesh.num_nodes());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = field(mesh.nodes()[k].x, mesh.nodes()[k].y);
  return p;
}

double evaluate_pressure(const Mesh& mesh, std::span<const double> p, double x, double y) {
  const auto loc = mesh.locate(x, y);
  if (!loc) throw std::out_of_range("evaluate_pressure: point outside the domain");
  const auto& verts = mesh.triangles()[loc->triangle];
  double v = 0.0;
  for (int i = 0; i < 3; ++i) v += loc->barycentric[i] * p[verts[i]];
  return v;
}

std::array<double, 2> evaluate_displacement(const Mesh& mesh, std::span<const double> u, double x,
                                            double y) {
  const auto loc = mesh.locate(x, y);
  if (!loc) throw std::out_of_range("evaluate_displacement: point outside the domain");
  const auto nodes = p2_element_nodes(mesh, loc->triangle);
  const auto phi = p2_values(loc->barycentric);
  std::array<double, 2> v{0.0, 0.0};
  for (int a = 0; a < 6; ++a) {
    v[0] += phi[a] * u[displacement_dof(nodes[a], 0)];
    v[1] += phi[a] * u[displacement_dof(nodes[a], 1)];
  }
  return v;
}

}  // namespace biotfs
