#include "chblend/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chblend {

namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double distance(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace

bool Domain::valid() const {
  return std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
         std::isfinite(y_max) && x_min < x_max && y_min < y_max;
}

Mesh::Mesh(std::vector<Point> vertices, std::vector<Triangle> triangles, std::size_t nx,
           std::size_t ny)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), nx_(nx), ny_(ny) {
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (std::size_t k = 0; k < 3; ++k) {
      if (tri[k] >= vertices_.size())
        throw std::invalid_argument("triangle " + std::to_string(t) + " has out-of-range vertex");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw std::invalid_argument("triangle " + std::to_string(t) + " repeats a vertex");
    const Point& a = vertices_[tri[0]];
    const Point& b = vertices_[tri[1]];
    const Point& c = vertices_[tri[2]];
    const double area = signed_area(a, b, c);
    if (!(area > 0.0))
      throw std::invalid_argument("triangle " + std::to_string(t) + " is not counterclockwise");
    area_ += area;
    h_ = std::max({h_, distance(a, b), distance(b, c), distance(c, a)});
  }
}

Mesh build_structured(const Domain& domain, std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0) throw std::invalid_argument("build_structured: nx and ny must be >= 1");
  if (!domain.valid()) throw std::invalid_argument("build_structured: degenerate domain");

  const double dx = (domain.x_max - domain.x_min) / static_cast<double>(nx);
  const double dy = (domain.y_max - domain.y_min) / static_cast<double>(ny);

  std::vector<Point> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    // Pin the last row/column to the exact boundary coordinate.
    const double y = j == ny ? domain.y_max : domain.y_min + static_cast<double>(j) * dy;
    for (std::size_t i = 0; i <= nx; ++i) {
      const double x = i == nx ? domain.x_max : domain.x_min + static_cast<double>(i) * dx;
      vertices.push_back({x, y});
    }
  }

  const auto id = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
  std::vector<Triangle> triangles;
  triangles.reserve(2 * nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t ll = id(i, j);
      const std::size_t lr = id(i + 1, j);
      const std::size_t ul = id(i, j + 1);
      const std::size_t ur = id(i + 1, j + 1);
      triangles.push_back({ll, lr, ur});
      triangles.push_back({ll, ur, ul});
    }
  }
  return Mesh(std::move(vertices), std::move(triangles), nx, ny);
}

ElementGeometry triangle_geometry(const Point& a, const Point& b, const Point& c) {
  const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
  ElementGeometry geo;
  geo.area = 0.5 * det;
  // grad(lambda_a) is the inward normal of the opposite edge scaled by 1/det.
  geo.grad[0] = {(b.y - c.y) / det, (c.x - b.x) / det};
  geo.grad[1] = {(c.y - a.y) / det, (a.x - c.x) / det};
  geo.grad[2] = {(a.y - b.y) / det, (b.x - a.x) / det};
  return geo;
}

ElementGeometry element_geometry(const Mesh& mesh, std::size_t t) {
  if (t >= mesh.num_triangles())
    throw std::out_of_range("element_geometry: triangle index " + std::to_string(t) +
                            " out of range");
  const auto& tri = mesh.triangles()[t];
  const auto& v = mesh.vertices();
  return triangle_geometry(v[tri[0]], v[tri[1]], v[tri[2]]);
}

std::array<double, 3> barycentric(const Mesh& mesh, std::size_t t, const Point& p) {
  const auto geo = element_geometry(mesh, t);
  const auto& tri = mesh.triangles()[t];
  const auto& v = mesh.vertices();
  std::array<double, 3> lambda{};
  // lambda_a is affine, equal to 1 at vertex a and 0 at the other two.
  for (std::size_t a = 0; a < 3; ++a) {
    const Point& va = v[tri[a]];
    lambda[a] = 1.0 + geo.grad[a][0] * (p.x - va.x) + geo.grad[a][1] * (p.y - va.y);
  }
  return lambda;
}

}  // namespace chblend
