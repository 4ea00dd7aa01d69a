#include "biotfs/element.hpp"

#include <cmath>
#include <stdexcept>

namespace biotfs {

TriangleGeometry triangle_geometry(const Triangle& tri) {
  const double x10 = tri[1].x - tri[0].x;
  const double y10 = tri[1].y - tri[0].y;
  const double x20 = tri[2].x - tri[0].x;
  const double y20 = tri[2].y - tri[0].y;
  const double det = x10 * y20 - x20 * y10;
  const double scale = std::abs(x10 * y20) + std::abs(x20 * y10);
  if (!(det > 1e-14 * scale) || scale == 0.0) {
    throw std::domain_error("triangle_geometry: degenerate or inverted triangle");
  }
  TriangleGeometry g;
  g.area = 0.5 * det;
  // grad L1 = (y20, -x20)/det, grad L2 = (-y10, x10)/det, grad L0 = -(grad L1 + grad L2)
  g.grad_bary[1] = {y20 / det, -x20 / det};
  g.grad_bary[2] = {-y10 / det, x10 / det};
  g.grad_bary[0] = {-(g.grad_bary[1].x + g.grad_bary[2].x), -(g.grad_bary[1].y + g.grad_bary[2].y)};
  return g;
}

const std::array<QuadraturePoint, 6>& gauss6() {
  static const std::array<QuadraturePoint, 6> rule = [] {
    constexpr double a = 0.44594849091596488632;
    constexpr double wa = 0.22338158967801146570;
    constexpr double b = 0.09157621350977074346;
    constexpr double wb = 0.10995174365532186764;
    return std::array<QuadraturePoint, 6>{{
        {{a, a, 1.0 - 2.0 * a}, wa},
        {{a, 1.0 - 2.0 * a, a}, wa},
        {{1.0 - 2.0 * a, a, a}, wa},
        {{b, b, 1.0 - 2.0 * b}, wb},
        {{b, 1.0 - 2.0 * b, b}, wb},
        {{1.0 - 2.0 * b, b, b}, wb},
    }};
  }();
  return rule;
}

std::array<double, 6> p2_values(const std::array<double, 3>& l) {
  return {l[0] * (2.0 * l[0] - 1.0), l[1] * (2.0 * l[1] - 1.0), l[2] * (2.0 * l[2] - 1.0),
          4.0 * l[0] * l[1],         4.0 * l[1] * l[2],         4.0 * l[2] * l[0]};
}

std::array<Point, 6> p2_gradients(const std::array<double, 3>& l, const TriangleGeometry& g) {
  const auto& d = g.grad_bary;
  std::array<Point, 6> out;
  for (int k = 0; k < 3; ++k) {
    const double s = 4.0 * l[k] - 1.0;
    out[k] = {s * d[k].x, s * d[k].y};
  }
  for (int k = 0; k < 3; ++k) {
    const int i = k;
    const int j = (k + 1) % 3;
    out[3 + k] = {4.0 * (l[i] * d[j].x + l[j] * d[i].x), 4.0 * (l[i] * d[j].y + l[j] * d[i].y)};
  }
  return out;
}

SmallMatrix<12, 12> p2_elasticity_element(const Triangle& tri, double shear_modulus,
                                          double lame_lambda) {
  const auto geo = triangle_geometry(tri);
  SmallMatrix<12, 12> k{};
  for (const auto& q : gauss6()) {
    const auto grad = p2_gradients(q.bary, geo);
    const double w = q.weight * geo.area;
    for (int a = 0; a < 6; ++a) {
      const double ga[2] = {grad[a].x, grad[a].y};
      for (int b = 0; b < 6; ++b) {
        const double gb[2] = {grad[b].x, grad[b].y};
        const double dotab = ga[0] * gb[0] + ga[1] * gb[1];
        for (int c = 0; c < 2; ++c) {
          for (int d = 0; d < 2; ++d) {
            // 2G eps(phi_a e_c):eps(phi_b e_d) = G (delta_cd grad a.grad b + d_d a d_c b)
            double v = shear_modulus * ((c == d ? dotab : 0.0) + ga[d] * gb[c]);
            v += lame_lambda * ga[c] * gb[d];
            k[2 * a + c][2 * b + d] += w * v;
          }
        }
      }
    }
  }
  // Mirror the upper triangle so the element is symmetric bit for bit.
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < i; ++j) k[i][j] = k[j][i];
  }
  return k;
}

SmallMatrix<3, 12> p2p1_divergence_element(const Triangle& tri) {
  const auto geo = triangle_geometry(tri);
  SmallMatrix<3, 12> m{};
  for (const auto& q : gauss6()) {
    const auto grad = p2_gradients(q.bary, geo);
    const double w = q.weight * geo.area;
    for (int i = 0; i < 3; ++i) {
      for (int b = 0; b < 6; ++b) {
        m[i][2 * b] += w * q.bary[i] * grad[b].x;
        m[i][2 * b + 1] += w * q.bary[i] * grad[b].y;
      }
    }
  }
  return m;
}

SmallMatrix<3, 3> p1_stiffness_element(const Triangle& tri, double coefficient) {
  const auto geo = triangle_geometry(tri);
  SmallMatrix<3, 3> m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      m[i][j] = coefficient * geo.area *
                (geo.grad_bary[i].x * geo.grad_bary[j].x + geo.grad_bary[i].y * geo.grad_bary[j].y);
    }
  }
  return m;
}

SmallMatrix<3, 3> p1_mass_element(const Triangle& tri) {
  const auto geo = triangle_geometry(tri);
  SmallMatrix<3, 3> m{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m[i][j] = geo.area * (i == j ? 1.0 / 6.0 : 1.0 / 12.0);
  }
  return m;
}

}  // namespace biotfs
