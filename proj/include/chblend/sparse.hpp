#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace chblend {

using Vector = std::vector<double>;

/// Nodal values of a P1 field, one per mesh vertex.
using NodalField = std::vector<double>;

/// Compressed-row sparsity structure: sorted, unique column indices per row.
struct SparsityPattern {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets;  // size n_rows + 1
  std::vector<std::size_t> columns;

  std::size_t nnz() const { return columns.size(); }

  /// Position of (row, col) in the value array, or nnz() if structurally zero.
  std::size_t find(std::size_t row, std::size_t col) const;
};

/// CSR matrix. Matrices built on the same mesh share one pattern object, so
/// linear combinations reduce to operations on the value arrays.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  explicit SparseMatrix(std::shared_ptr<const SparsityPattern> pattern);
  SparseMatrix(std::shared_ptr<const SparsityPattern> pattern, std::vector<double> values);

  std::size_t rows() const { return pattern_ ? pattern_->n_rows : 0; }
  std::size_t cols() const { return pattern_ ? pattern_->n_cols : 0; }
  std::size_t nnz() const { return values_.size(); }

  const SparsityPattern& pattern() const { return *pattern_; }
  const std::shared_ptr<const SparsityPattern>& pattern_ptr() const { return pattern_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Entry (row, col); zero when outside the pattern.
  double at(std::size_t row, std::size_t col) const;

  /// Adds to an entry that must be inside the pattern.
  void add(std::size_t row, std::size_t col, double value);

  Vector multiply(std::span<const double> x) const;

  /// y += scale * A x
  void multiply_add(std::span<const double> x, std::span<double> y, double scale = 1.0) const;

  double sum() const;

  /// max |A_ij - A_ji| over the pattern (the pattern must be structurally symmetric).
  double asymmetry() const;

  bool same_pattern(const SparseMatrix& other) const;

  /// this += scale * other. Patterns must be identical.
  SparseMatrix& add_scaled(const SparseMatrix& other, double scale);
  SparseMatrix& scale(double factor);

  /// Dense row-major copy, for small systems and tests.
  std::vector<double> to_dense() const;

 private:
  std::shared_ptr<const SparsityPattern> pattern_;
  std::vector<double> values_;
};

/// Builds a pattern from per-row column lists (sorted and deduplicated here).
std::shared_ptr<const SparsityPattern> make_pattern(std::size_t n_cols,
                                                    std::vector<std::vector<std::size_t>> rows);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

}  // namespace chblend
