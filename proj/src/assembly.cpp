#include "chblend/assembly.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace chblend {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

double barycentric_monomial_integral(double area, int a, int b, int c) {
  if (a < 0 || b < 0 || c < 0) throw std::invalid_argument("negative barycentric exponent");
  return 2.0 * area * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
}

Assembler::Assembler(const Mesh& mesh)
    : n_(mesh.num_vertices()), triangles_(mesh.triangles()) {
  geometry_.reserve(triangles_.size());
  for (std::size_t t = 0; t < triangles_.size(); ++t) geometry_.push_back(element_geometry(mesh, t));

  std::vector<std::vector<std::size_t>> rows(n_);
  for (const auto& tri : triangles_)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) rows[tri[a]].push_back(tri[b]);
  pattern_ = make_pattern(n_, std::move(rows));

  scatter_.reserve(triangles_.size());
  for (const auto& tri : triangles_) {
    std::array<std::size_t, 9> pos{};
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) pos[3 * a + b] = pattern_->find(tri[a], tri[b]);
    scatter_.push_back(pos);
  }
}

std::array<std::array<double, 3>, 3> Assembler::local_mass(double area) {
  const double diag = barycentric_monomial_integral(area, 2, 0, 0);
  const double off = barycentric_monomial_integral(area, 1, 1, 0);
  return {{{diag, off, off}, {off, diag, off}, {off, off, diag}}};
}

std::array<std::array<double, 3>, 3> Assembler::local_stiffness(const ElementGeometry& geo) {
  std::array<std::array<double, 3>, 3> k{};
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a; b < 3; ++b) {
      const double v =
          geo.area * (geo.grad[a][0] * geo.grad[b][0] + geo.grad[a][1] * geo.grad[b][1]);
      k[a][b] = v;
      k[b][a] = v;
    }
  }
  return k;
}

std::array<std::array<double, 3>, 3> Assembler::local_weighted_mass(
    double area, const std::array<double, 3>& c) {
  // int lambda_a lambda_b lambda_c depends only on how many indices coincide.
  static const double unit_same3 = barycentric_monomial_integral(1.0, 3, 0, 0);
  static const double unit_same2 = barycentric_monomial_integral(1.0, 2, 1, 0);
  static const double unit_distinct = barycentric_monomial_integral(1.0, 1, 1, 1);
  const double same3 = area * unit_same3;
  const double same2 = area * unit_same2;
  const double distinct = area * unit_distinct;
  const auto triple = [&](std::size_t a, std::size_t b, std::size_t d) {
    if (a == b && b == d) return same3;
    if (a == b || b == d || a == d) return same2;
    return distinct;
  };
  std::array<std::array<double, 3>, 3> m{};
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a; b < 3; ++b) {
      double v = 0.0;
      for (std::size_t d = 0; d < 3; ++d) v += c[d] * triple(a, b, d);
      m[a][b] = v;
      m[b][a] = v;
    }
  }
  return m;
}

template <typename LocalFn>
void Assembler::assemble_into(SparseMatrix& out, LocalFn&& local) const {
  if (out.pattern_ptr() != pattern_) throw std::invalid_argument("Assembler: foreign pattern");
  auto values = out.values();
  std::fill(values.begin(), values.end(), 0.0);
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto loc = local(t);
    const auto& pos = scatter_[t];
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b) values[pos[3 * a + b]] += loc[a][b];
  }
}

SparseMatrix Assembler::mass() const {
  SparseMatrix m(pattern_);
  assemble_into(m, [&](std::size_t t) { return local_mass(geometry_[t].area); });
  return m;
}

SparseMatrix Assembler::stiffness() const {
  SparseMatrix k(pattern_);
  assemble_into(k, [&](std::size_t t) { return local_stiffness(geometry_[t]); });
  return k;
}

SparseMatrix Assembler::weighted_mass(std::span<const double> c) const {
  SparseMatrix m(pattern_);
  weighted_mass_into(c, m);
  return m;
}

void Assembler::weighted_mass_into(std::span<const double> c, SparseMatrix& out) const {
  if (c.size() != n_)
    throw std::invalid_argument("weighted_mass: weight has " + std::to_string(c.size()) +
                                " values, mesh has " + std::to_string(n_) + " vertices");
  assemble_into(out, [&](std::size_t t) {
    const auto& tri = triangles_[t];
    return local_weighted_mass(geometry_[t].area, {c[tri[0]], c[tri[1]], c[tri[2]]});
  });
}

SparseMatrix mass_matrix(const Mesh& mesh) { return Assembler(mesh).mass(); }

SparseMatrix stiffness_matrix(const Mesh& mesh) { return Assembler(mesh).stiffness(); }

SparseMatrix weighted_mass_matrix(const Mesh& mesh, std::span<const double> c) {
  return Assembler(mesh).weighted_mass(c);
}

Vector load_vector(const Mesh& mesh, std::span<const double> f) {
  return load_vector(mass_matrix(mesh), f);
}

Vector load_vector(const SparseMatrix& mass, std::span<const double> f) {
  if (f.size() != mass.cols()) throw std::invalid_argument("load_vector: size mismatch");
  return mass.multiply(f);
}

}  // namespace chblend
