#pragma once

// Element kernels for the P2 (displacement) / P1 (pressure) triangle.
//
// Local P2 nodes: 0,1,2 are the vertices, 3,4,5 the midpoints of the edges
// (0,1), (1,2), (2,0). Local displacement dof of node k, component c is 2k+c.

#include <array>

#include "biotfs/mesh.hpp"

namespace biotfs {

template <int R, int C>
using SmallMatrix = std::array<std::array<double, C>, R>;

using Triangle = std::array<Point, 3>;

struct TriangleGeometry {
  double area = 0.0;
  /// Gradients of the barycentric coordinates.
  std::array<Point, 3> grad_bary{};
};

/// Throws std::domain_error when the triangle has (numerically) zero or
/// negative area.
TriangleGeometry triangle_geometry(const Triangle& tri);

struct QuadraturePoint {
  std::array<double, 3> bary;
  double weight;  // relative to the triangle area, weights sum to 1
};

/// Symmetric 6-point Gauss rule, exact for polynomials of degree 4.
const std::array<QuadraturePoint, 6>& gauss6();

std::array<double, 6> p2_values(const std::array<double, 3>& bary);
std::array<Point, 6> p2_gradients(const std::array<double, 3>& bary, const TriangleGeometry& g);

/// 2G (eps(phi_j), eps(phi_i)) + lambda (div phi_j, div phi_i).
SmallMatrix<12, 12> p2_elasticity_element(const Triangle& tri, double shear_modulus,
                                          double lame_lambda);
/// Rows: P1 pressure basis, columns: P2 displacement dofs; entries (div phi_j, psi_i).
SmallMatrix<3, 12> p2p1_divergence_element(const Triangle& tri);
SmallMatrix<3, 3> p1_stiffness_element(const Triangle& tri, double coefficient);
SmallMatrix<3, 3> p1_mass_element(const Triangle& tri);

}  // namespace biotfs
