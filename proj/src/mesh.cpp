#include "biotfs/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace biotfs {

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Left: return "Left";
    case BoundaryTag::Bottom: return "Bottom";
    case BoundaryTag::Right: return "Right";
    case BoundaryTag::Top: return "Top";
  }
  return "?";
}

Point Mesh::midpoint(int edge) const {
  const auto& e = edges_[edge];
  return {0.5 * (nodes_[e.v0].x + nodes_[e.v1].x), 0.5 * (nodes_[e.v0].y + nodes_[e.v1].y)};
}

double Mesh::signed_area(int triangle) const {
  const auto& t = triangles_[triangle];
  const Point& p0 = nodes_[t[0]];
  const Point& p1 = nodes_[t[1]];
  const Point& p2 = nodes_[t[2]];
  return 0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y));
}

std::optional<PointLocation> Mesh::locate(double x, double y) const {
  const double tol = 1e-12 * std::max(width_, height_);
  if (x < -tol || x > width_ + tol || y < -tol || y > height_ + tol) return std::nullopt;

  const double s_global = std::clamp(x / hx(), 0.0, static_cast<double>(nx_));
  const double t_global = std::clamp(y / hy(), 0.0, static_cast<double>(ny_));
  const int i = std::min(static_cast<int>(s_global), nx_ - 1);
  const int j = std::min(static_cast<int>(t_global), ny_ - 1);
  const double s = s_global - i;
  const double t = t_global - j;

  PointLocation loc;
  const int cell = j * nx_ + i;
  // Lower triangle (00,10,11) holds s >= t, upper (00,11,01) holds s < t.
  if (s >= t) {
    loc.triangle = 2 * cell;
    loc.barycentric = {1.0 - s, s - t, t};
  } else {
    loc.triangle = 2 * cell + 1;
    loc.barycentric = {1.0 - t, s, t - s};
  }
  return loc;
}

Mesh build_rect(double a, double b, int nx, int ny) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("build_rect: domain dimensions must be positive");
  }
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("build_rect: cell counts must be at least 1");
  }

  Mesh mesh;
  mesh.nx_ = nx;
  mesh.ny_ = ny;
  mesh.width_ = a;
  mesh.height_ = b;

  mesh.nodes_.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.nodes_.push_back({i == nx ? a : i * a / nx, j == ny ? b : j * b / ny});
    }
  }

  mesh.triangles_.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = mesh.node_index(i, j);
      const int v10 = mesh.node_index(i + 1, j);
      const int v11 = mesh.node_index(i + 1, j + 1);
      const int v01 = mesh.node_index(i, j + 1);
      mesh.triangles_.push_back({v00, v10, v11});
      mesh.triangles_.push_back({v00, v11, v01});
    }
  }

  std::map<std::pair<int, int>, int> edge_ids;
  mesh.triangle_edges_.resize(mesh.triangles_.size());
  for (std::size_t t = 0; t < mesh.triangles_.size(); ++t) {
    const auto& tri = mesh.triangles_[t];
    for (int k = 0; k < 3; ++k) {
      const int u = tri[k];
      const int v = tri[(k + 1) % 3];
      const auto key = std::minmax(u, v);
      auto [it, inserted] = edge_ids.try_emplace({key.first, key.second},
                                                 static_cast<int>(mesh.edges_.size()));
      if (inserted) mesh.edges_.push_back({key.first, key.second});
      mesh.triangle_edges_[t][k] = it->second;
    }
  }

  auto side_of = [&](const Point& p, const Point& q) -> std::optional<BoundaryTag> {
    if (p.x == 0.0 && q.x == 0.0) return BoundaryTag::Left;
    if (p.y == 0.0 && q.y == 0.0) return BoundaryTag::Bottom;
    if (p.x == a && q.x == a) return BoundaryTag::Right;
    if (p.y == b && q.y == b) return BoundaryTag::Top;
    return std::nullopt;
  };

  mesh.edge_tags_.resize(mesh.edges_.size());
  for (std::size_t e = 0; e < mesh.edges_.size(); ++e) {
    const auto tag = side_of(mesh.nodes_[mesh.edges_[e].v0], mesh.nodes_[mesh.edges_[e].v1]);
    mesh.edge_tags_[e] = tag;
    if (tag) mesh.boundary_edges_.push_back({static_cast<int>(e), *tag});
  }

  for (std::size_t t = 0; t < mesh.triangles_.size(); ++t) {
    if (!(mesh.signed_area(static_cast<int>(t)) > 0.0)) {
      throw std::runtime_error("build_rect: degenerate triangle " + std::to_string(t));
    }
  }
  return mesh;
}

std::vector<int> boundary_nodes(const Mesh& mesh, BoundaryTag tag) {
  std::vector<int> out;
  const int nx = mesh.nx();
  const int ny = mesh.ny();
  switch (tag) {
    case BoundaryTag::Left:
      for (int j = 0; j <= ny; ++j) out.push_back(mesh.node_index(0, j));
      break;
    case BoundaryTag::Right:
      for (int j = 0; j <= ny; ++j) out.push_back(mesh.node_index(nx, j));
      break;
    case BoundaryTag::Bottom:
      for (int i = 0; i <= nx; ++i) out.push_back(mesh.node_index(i, 0));
      break;
    case BoundaryTag::Top:
      for (int i = 0; i <= nx; ++i) out.push_back(mesh.node_index(i, ny));
      break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace biotfs
