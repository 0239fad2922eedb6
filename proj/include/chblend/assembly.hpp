#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "chblend/mesh.hpp"
#include "chblend/sparse.hpp"

namespace chblend {

/// Exact integral over a triangle of area `area` of
/// lambda_1^a * lambda_2^b * lambda_3^c, i.e. 2 A a! b! c! / (a+b+c+2)!.
double barycentric_monomial_integral(double area, int a, int b, int c);

/// Assembles P1 operators on one mesh. All matrices share the vertex
/// adjacency pattern, which lets callers combine them value-wise.
///
/// Integration is exact: every integrand is a polynomial of degree <= 3 on an
/// element and is integrated with the closed-form barycentric formula. Local
/// matrices are symmetric by construction and are scattered into both
/// triangles of the global matrix in the same order, so the assembled
/// matrices are bitwise symmetric.
class Assembler {
 public:
  explicit Assembler(const Mesh& mesh);

  std::size_t size() const { return n_; }
  const std::shared_ptr<const SparsityPattern>& pattern() const { return pattern_; }
  const std::vector<ElementGeometry>& geometry() const { return geometry_; }

  /// M_ij = int phi_i phi_j
  SparseMatrix mass() const;

  /// K_ij = int grad phi_i . grad phi_j
  SparseMatrix stiffness() const;

  /// (M_c)_ij = int c_h phi_i phi_j with c_h the P1 interpolant of c.
  SparseMatrix weighted_mass(std::span<const double> c) const;

  /// Same as weighted_mass, overwriting the values of `out` (which must use
  /// this assembler's pattern).
  void weighted_mass_into(std::span<const double> c, SparseMatrix& out) const;

  static std::array<std::array<double, 3>, 3> local_mass(double area);
  static std::array<std::array<double, 3>, 3> local_stiffness(const ElementGeometry& geo);
  static std::array<std::array<double, 3>, 3> local_weighted_mass(double area,
                                                                  const std::array<double, 3>& c);

 private:
  template <typename LocalFn>
  void assemble_into(SparseMatrix& out, LocalFn&& local) const;

  std::size_t n_;
  std::vector<Triangle> triangles_;
  std::vector<ElementGeometry> geometry_;
  std::shared_ptr<const SparsityPattern> pattern_;
  // Value-array position of local entry (a, b) for every element.
  std::vector<std::array<std::size_t, 9>> scatter_;
};

SparseMatrix mass_matrix(const Mesh& mesh);
SparseMatrix stiffness_matrix(const Mesh& mesh);
SparseMatrix weighted_mass_matrix(const Mesh& mesh, std::span<const double> c);

/// b = M f, the Galerkin load vector of the P1 interpolant of f.
Vector load_vector(const Mesh& mesh, std::span<const double> f);
Vector load_vector(const SparseMatrix& mass, std::span<const double> f);

}  // namespace chblend
