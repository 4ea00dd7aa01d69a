#pragma once

// Reference computations used as test oracles. They share no code with the
// library: dense elimination instead of sparse factorizations, a degree-5
// quadrature rule instead of the degree-4 one, and shape functions obtained
// by inverting a monomial Vandermonde matrix instead of barycentric formulas.

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(int rows, int cols) { return Dense(rows, std::vector<double>(cols, 0.0)); }

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Dense a, std::vector<double> b) {
  const int n = static_cast<int>(a.size());
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    }
    if (a[piv][k] == 0.0) throw std::runtime_error("dense_solve: singular matrix");
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      if (f == 0.0) continue;
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

inline std::vector<double> dense_mv(const Dense& a, const std::vector<double>& x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  }
  return y;
}

struct QPoint {
  double x, y, w;  // w relative to the triangle area
};

/// Radon's 7-point rule, exact for degree 5, mapped onto a triangle.
inline std::vector<QPoint> gauss7(const std::array<std::array<double, 2>, 3>& v) {
  const double s15 = std::sqrt(15.0);
  const double a1 = (6.0 - s15) / 21.0, w1 = (155.0 - s15) / 1200.0;
  const double a2 = (6.0 + s15) / 21.0, w2 = (155.0 + s15) / 1200.0;
  const std::vector<std::pair<std::array<double, 3>, double>> bary = {
      {{1.0 / 3, 1.0 / 3, 1.0 / 3}, 9.0 / 40.0},
      {{a1, a1, 1 - 2 * a1}, w1},
      {{a1, 1 - 2 * a1, a1}, w1},
      {{1 - 2 * a1, a1, a1}, w1},
      {{a2, a2, 1 - 2 * a2}, w2},
      {{a2, 1 - 2 * a2, a2}, w2},
      {{1 - 2 * a2, a2, a2}, w2},
  };
  std::vector<QPoint> pts;
  for (const auto& [l, w] : bary) {
    pts.push_back({l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
                   l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1], w});
  }
  return pts;
}

inline double area(const std::array<std::array<double, 2>, 3>& v) {
  return 0.5 * ((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) -
                (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
}

inline Dense invert(const Dense& a) {
  const int n = static_cast<int>(a.size());
  Dense inv = zeros(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    const auto col = dense_solve(a, e);
    for (int i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return inv;
}

/// Nodal basis of a polynomial space spanned by monomials, built by
/// inverting the Vandermonde matrix at the given nodes.
struct NodalBasis {
  Dense coef;  // coef[k][j]: coefficient of monomial k in basis function j
  int degree;

  static std::array<double, 6> monomials(double x, double y) {
    return {1.0, x, y, x * x, x * y, y * y};
  }
  static std::array<std::array<double, 2>, 6> monomial_gradients(double x, double y) {
    return {{{0, 0}, {1, 0}, {0, 1}, {2 * x, 0}, {y, x}, {0, 2 * y}}};
  }

  NodalBasis(const std::vector<std::array<double, 2>>& nodes, int deg) : degree(deg) {
    const int n = static_cast<int>(nodes.size());
    Dense v = zeros(n, n);
    for (int i = 0; i < n; ++i) {
      const auto m = monomials(nodes[i][0], nodes[i][1]);
      for (int k = 0; k < n; ++k) v[i][k] = m[k];
    }
    coef = invert(v);
  }

  int size() const { return static_cast<int>(coef.size()); }

  double value(int j, double x, double y) const {
    const auto m = monomials(x, y);
    double s = 0.0;
    for (int k = 0; k < size(); ++k) s += coef[k][j] * m[k];
    return s;
  }
  std::array<double, 2> gradient(int j, double x, double y) const {
    const auto g = monomial_gradients(x, y);
    std::array<double, 2> s{0.0, 0.0};
    for (int k = 0; k < size(); ++k) {
      s[0] += coef[k][j] * g[k][0];
      s[1] += coef[k][j] * g[k][1];
    }
    return s;
  }
};

inline NodalBasis p1_basis(const std::array<std::array<double, 2>, 3>& v) {
  return NodalBasis({v[0], v[1], v[2]}, 1);
}

/// Vertices, then midpoints of (0,1), (1,2), (2,0).
inline NodalBasis p2_basis(const std::array<std::array<double, 2>, 3>& v) {
  auto mid = [&](int a, int b) {
    return std::array<double, 2>{0.5 * (v[a][0] + v[b][0]), 0.5 * (v[a][1] + v[b][1])};
  };
  return NodalBasis({v[0], v[1], v[2], mid(0, 1), mid(1, 2), mid(2, 0)}, 2);
}

/// 2G eps(u):eps(v) + lambda div u div v for vector fields given by their
/// gradients g[c][d] = d u_c / d x_d.
inline double elastic_energy_density(const std::array<std::array<double, 2>, 2>& gu,
                                     const std::array<std::array<double, 2>, 2>& gv, double shear,
                                     double lambda) {
  double eps = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double eu = 0.5 * (gu[i][j] + gu[j][i]);
      const double ev = 0.5 * (gv[i][j] + gv[j][i]);
      eps += eu * ev;
    }
  }
  const double du = gu[0][0] + gu[1][1];
  const double dv = gv[0][0] + gv[1][1];
  return 2.0 * shear * eps + lambda * du * dv;
}

/// Gradient of the vector field phi_node * e_comp.
inline std::array<std::array<double, 2>, 2> vector_gradient(const NodalBasis& b, int node, int comp,
                                                            double x, double y) {
  std::array<std::array<double, 2>, 2> g{};
  g[comp] = b.gradient(node, x, y);
  return g;
}

}  // namespace oracle
