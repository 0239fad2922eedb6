#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace chblend {

/// Axis-aligned rectangle (x_min, x_max) x (y_min, y_max).
struct Domain {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double area() const { return (x_max - x_min) * (y_max - y_min); }
  bool valid() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

using Triangle = std::array<std::size_t, 3>;

/// Constant data of a P1 element: its area and the gradients of the three
/// barycentric basis functions (row a is grad(lambda_a)).
struct ElementGeometry {
  double area = 0.0;
  std::array<std::array<double, 2>, 3> grad{};
};

/// Conforming triangulation with P1 nodal basis. Immutable once built.
class Mesh {
 public:
  Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles, std::size_t nx,
       std::size_t ny);

  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }

  /// Longest edge over all triangles.
  double h() const { return h_; }

  /// Sum of element areas.
  double area() const { return area_; }

 private:
  std::vector<Point> vertices_;
  std::vector<Triangle> triangles_;
  std::size_t nx_;
  std::size_t ny_;
  double h_ = 0.0;
  double area_ = 0.0;
};

/// Structured nx-by-ny grid of the domain. Vertices are numbered row-major
/// (x fastest); every cell is split along its lower-left to upper-right
/// diagonal into two counterclockwise triangles.
Mesh build_structured(const Domain& domain, std::size_t nx, std::size_t ny);

/// Throws std::out_of_range for an invalid triangle index.
ElementGeometry element_geometry(const Mesh& mesh, std::size_t t);

/// Geometry of a free-standing triangle; the vertices must be counterclockwise.
ElementGeometry triangle_geometry(const Point& a, const Point& b, const Point& c);

/// Barycentric coordinates of p with respect to triangle t.
std::array<double, 3> barycentric(const Mesh& mesh, std::size_t t, const Point& p);

}  // namespace chblend
