#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace biotfs {

enum class BoundaryTag { Left, Bottom, Right, Top };

std::string_view to_string(BoundaryTag tag);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Edge {
  int v0 = 0;
  int v1 = 0;
};

struct BoundaryEdge {
  int edge = 0;
  BoundaryTag tag = BoundaryTag::Left;
};

/// Location of a point inside the triangulation.
struct PointLocation {
  int triangle = -1;
  std::array<double, 3> barycentric{};
};

/**
 * Structured triangulation of the rectangle [0,a]x[0,b].
 *
 * Every cell (i,j) is split along its bottom-left to top-right diagonal into
 * two counterclockwise triangles. Edges are numbered uniquely; the local edge
 * k of a triangle joins local vertices k and (k+1)%3, which is also the
 * ordering used for the quadratic midpoint nodes.
 */
class Mesh {
 public:
  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// Global edge index of local edge k of triangle t.
  const std::vector<std::array<int, 3>>& triangle_edges() const { return triangle_edges_; }
  const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double width() const { return width_; }
  double height() const { return height_; }
  double hx() const { return width_ / nx_; }
  double hy() const { return height_ / ny_; }

  int node_index(int i, int j) const { return j * (nx_ + 1) + i; }

  /// Tag of an edge, empty for interior edges.
  std::optional<BoundaryTag> edge_tag(int edge) const { return edge_tags_[edge]; }

  Point midpoint(int edge) const;
  double signed_area(int triangle) const;

  /// Triangle containing (x,y) and its barycentric coordinates; empty if the
  /// point lies outside the rectangle.
  std::optional<PointLocation> locate(double x, double y) const;

  friend Mesh build_rect(double a, double b, int nx, int ny);

 private:
  Mesh() = default;

  std::vector<Point> nodes_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> triangle_edges_;
  std::vector<std::optional<BoundaryTag>> edge_tags_;
  std::vector<BoundaryEdge> boundary_edges_;
  int nx_ = 0;
  int ny_ = 0;
  double width_ = 0.0;
  double height_ = 0.0;
};

/// Throws std::invalid_argument for non-positive dimensions or cell counts.
Mesh build_rect(double a, double b, int nx, int ny);

/// Sorted indices of the vertices lying on the tagged side. Corners belong to
/// both adjacent sides.
std::vector<int> boundary_nodes(const Mesh& mesh, BoundaryTag tag);

}  // namespace biotfs
