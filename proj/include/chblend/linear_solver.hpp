#pragma once

#include <functional>
#include <memory>
#include <span>

#include "chblend/sparse.hpp"

namespace chblend {

struct SolveOptions {
  double tol = 1e-10;  // relative residual ||Ax - b|| / ||b||
  int max_iter = 10;   // refinement sweeps (direct) or Krylov iterations (GMRES)
};

struct SolveReport {
  double residual = 0.0;  // final relative residual
  int iterations = 0;
};

/// Sparse direct solver for general (nonsymmetric, indefinite) square
/// systems. The fill-reducing ordering is computed once per sparsity pattern
/// and reused by later factorizations of matrices with the same pattern.
///
/// Each solve is followed by residual-driven iterative refinement; the
/// result is accepted only if the relative residual reaches `tol` within
/// `max_iter` refinement sweeps. Otherwise LinearSolveFailure is thrown.
class SparseLuSolver {
 public:
  SparseLuSolver();
  ~SparseLuSolver();
  SparseLuSolver(SparseLuSolver&&) noexcept;
  SparseLuSolver& operator=(SparseLuSolver&&) noexcept;

  /// Throws LinearSolveFailure if the matrix is numerically singular.
  void factorize(const SparseMatrix& a);
  bool factorized() const;

  Vector solve(std::span<const double> b, const SolveOptions& options,
               SolveReport* report = nullptr) const;

  /// Raw application of the stored factors, (LU)^{-1} r, without refinement.
  Vector apply(std::span<const double> r) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot factorize-and-solve.
Vector solve_linear(const SparseMatrix& a, std::span<const double> b,
                    const SolveOptions& options = {}, SolveReport* report = nullptr);

using Preconditioner = std::function<Vector(std::span<const double>)>;

/// Restarted right-preconditioned GMRES starting from `x0`. Returns the
/// iterate whose true relative residual is <= tol; throws LinearSolveFailure
/// when max_iter iterations are exhausted first.
Vector gmres(const SparseMatrix& a, std::span<const double> b, std::span<const double> x0,
             const Preconditioner& precond, const SolveOptions& options, int restart = 30,
             SolveReport* report = nullptr);

}  // namespace chblend
