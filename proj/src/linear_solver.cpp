#include "chblend/linear_solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "chblend/errors.hpp"

namespace chblend {

namespace {

using EigenCsr = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;
using EigenCsc = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenCsc to_eigen(const SparseMatrix& a) {
  const auto& p = a.pattern();
  std::vector<int> outer(p.row_offsets.begin(), p.row_offsets.end());
  std::vector<int> inner(p.columns.begin(), p.columns.end());
  const Eigen::Map<const EigenCsr> view(static_cast<int>(p.n_rows), static_cast<int>(p.n_cols),
                                        static_cast<int>(p.nnz()), outer.data(), inner.data(),
                                        a.values().data());
  EigenCsc csc = view;
  csc.makeCompressed();
  return csc;
}

double relative_residual(const SparseMatrix& a, std::span<const double> x,
                         std::span<const double> b, Vector& r) {
  r.assign(b.begin(), b.end());
  a.multiply_add(x, r, -1.0);
  const double nb = norm2(b);
  return norm2(r) / nb;
}

}  // namespace

struct SparseLuSolver::Impl {
  Eigen::SparseLU<EigenCsc, Eigen::COLAMDOrdering<int>> lu;
  std::shared_ptr<const SparsityPattern> analyzed;
  SparseMatrix matrix;
};

SparseLuSolver::SparseLuSolver() : impl_(std::make_unique<Impl>()) {}
SparseLuSolver::~SparseLuSolver() = default;
SparseLuSolver::SparseLuSolver(SparseLuSolver&&) noexcept = default;
SparseLuSolver& SparseLuSolver::operator=(SparseLuSolver&&) noexcept = default;

void SparseLuSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SparseLuSolver: matrix is not square");
  const EigenCsc csc = to_eigen(a);
  const bool reuse = impl_->analyzed &&
                     (impl_->analyzed == a.pattern_ptr() || impl_->matrix.same_pattern(a));
  if (!reuse) {
    impl_->lu.analyzePattern(csc);
    impl_->analyzed = a.pattern_ptr();
  }
  impl_->lu.factorize(csc);
  impl_->matrix = a;
  if (impl_->lu.info() != Eigen::Success) {
    impl_->analyzed.reset();
    throw LinearSolveFailure("sparse LU factorization failed: " + impl_->lu.lastErrorMessage(),
                             std::numeric_limits<double>::infinity());
  }
}

Vector SparseLuSolver::solve(std::span<const double> b, const SolveOptions& options,
                             SolveReport* report) const {
  const SparseMatrix& a = impl_->matrix;
  if (!impl_->analyzed) throw std::logic_error("SparseLuSolver::solve before factorize");
  if (b.size() != a.rows()) throw std::invalid_argument("SparseLuSolver::solve: size mismatch");
  for (double v : b)
    if (!std::isfinite(v))
      throw LinearSolveFailure("right-hand side is not finite",
                               std::numeric_limits<double>::infinity());

  Vector x(b.size(), 0.0);
  if (norm2(b) == 0.0) {
    if (report) *report = {0.0, 0};
    return x;
  }

  Vector r(b.begin(), b.end());
  x = apply(r);
  double res = relative_residual(a, x, b, r);
  int sweeps = 0;
  while (!(res <= options.tol) && sweeps < options.max_iter && std::isfinite(res)) {
    const Vector dx = apply(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    res = relative_residual(a, x, b, r);
    ++sweeps;
  }
  if (report) *report = {res, sweeps};
  if (!(res <= options.tol))
    throw LinearSolveFailure("relative residual " + std::to_string(res) + " above tolerance " +
                                 std::to_string(options.tol) + " after " +
                                 std::to_string(sweeps) + " refinement sweeps",
                             res);
  return x;
}

bool SparseLuSolver::factorized() const { return impl_->analyzed != nullptr; }

Vector SparseLuSolver::apply(std::span<const double> r) const {
  if (!impl_->analyzed) throw std::logic_error("SparseLuSolver::apply before factorize");
  const Eigen::Map<const Eigen::VectorXd> rhs(r.data(), static_cast<Eigen::Index>(r.size()));
  const Eigen::VectorXd sol = impl_->lu.solve(rhs);
  return Vector(sol.data(), sol.data() + sol.size());
}

Vector solve_linear(const SparseMatrix& a, std::span<const double> b, const SolveOptions& options,
                    SolveReport* report) {
  SparseLuSolver solver;
  solver.factorize(a);
  return solver.solve(b, options, report);
}

Vector gmres(const SparseMatrix& a, std::span<const double> b, std::span<const double> x0,
             const Preconditioner& precond, const SolveOptions& options, int restart,
             SolveReport* report) {
  const std::size_t n = b.size();
  if (a.rows() != n || a.cols() != n || x0.size() != n)
    throw std::invalid_argument("gmres: dimension mismatch");
  const double nb = norm2(b);
  Vector x(x0.begin(), x0.end());
  if (nb == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    if (report) *report = {0.0, 0};
    return x;
  }
  const auto m = static_cast<std::size_t>(std::max(restart, 1));

  Vector r;
  double res = relative_residual(a, x, b, r);
  int iterations = 0;
  std::vector<Vector> basis;
  std::vector<Vector> directions;
  std::vector<std::vector<double>> hess;
  std::vector<double> cs(m), sn(m), g(m + 1);

  while (!(res <= options.tol) && iterations < options.max_iter && std::isfinite(res)) {
    const double beta = norm2(r);
    basis.assign(1, r);
    for (double& v : basis[0]) v /= beta;
    directions.clear();
    hess.assign(m, std::vector<double>(m + 1, 0.0));
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;

    std::size_t j = 0;
    for (; j < m && iterations < options.max_iter; ++j) {
      ++iterations;
      directions.push_back(precond ? precond(basis[j]) : Vector(basis[j].begin(), basis[j].end()));
      Vector w = a.multiply(directions[j]);
      auto& h = hess[j];
      for (std::size_t i = 0; i <= j; ++i) {
        h[i] = dot(w, basis[i]);
        for (std::size_t q = 0; q < n; ++q) w[q] -= h[i] * basis[i][q];
      }
      h[j + 1] = norm2(w);
      for (std::size_t i = 0; i < j; ++i) {
        const double t = cs[i] * h[i] + sn[i] * h[i + 1];
        h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
        h[i] = t;
      }
      const double denom = std::hypot(h[j], h[j + 1]);
      cs[j] = denom == 0.0 ? 1.0 : h[j] / denom;
      sn[j] = denom == 0.0 ? 0.0 : h[j + 1] / denom;
      const double hj1 = h[j + 1];
      h[j] = cs[j] * h[j] + sn[j] * hj1;
      h[j + 1] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      const bool breakdown = hj1 == 0.0;
      if (!breakdown) {
        basis.push_back(std::move(w));
        for (double& v : basis.back()) v /= hj1;
      }
      if (breakdown || std::abs(g[j + 1]) <= 0.1 * options.tol * nb) {
        ++j;
        break;
      }
    }

    // Back substitution on the triangularized Hessenberg system.
    std::vector<double> y(j, 0.0);
    for (std::size_t i = j; i-- > 0;) {
      double s = g[i];
      for (std::size_t q = i + 1; q < j; ++q) s -= hess[q][i] * y[q];
      y[i] = hess[i][i] == 0.0 ? 0.0 : s / hess[i][i];
    }
    for (std::size_t i = 0; i < j; ++i)
      for (std::size_t q = 0; q < n; ++q) x[q] += y[i] * directions[i][q];
    res = relative_residual(a, x, b, r);
  }

  if (report) *report = {res, iterations};
  if (!(res <= options.tol))
    throw LinearSolveFailure("GMRES reached relative residual " + std::to_string(res) +
                                 " after " + std::to_string(iterations) + " iterations",
                             res);
  return x;
}

}  // namespace chblend
