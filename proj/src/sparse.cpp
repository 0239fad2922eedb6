#include "chblend/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chblend {

std::size_t SparsityPattern::find(std::size_t row, std::size_t col) const {
  const auto first = columns.begin() + static_cast<std::ptrdiff_t>(row_offsets[row]);
  const auto last = columns.begin() + static_cast<std::ptrdiff_t>(row_offsets[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return nnz();
  return static_cast<std::size_t>(it - columns.begin());
}

std::shared_ptr<const SparsityPattern> make_pattern(std::size_t n_cols,
                                                    std::vector<std::vector<std::size_t>> rows) {
  auto pattern = std::make_shared<SparsityPattern>();
  pattern->n_rows = rows.size();
  pattern->n_cols = n_cols;
  pattern->row_offsets.reserve(rows.size() + 1);
  pattern->row_offsets.push_back(0);
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    if (!row.empty() && row.back() >= n_cols)
      throw std::invalid_argument("make_pattern: column index out of range");
    pattern->columns.insert(pattern->columns.end(), row.begin(), row.end());
    pattern->row_offsets.push_back(pattern->columns.size());
  }
  return pattern;
}

SparseMatrix::SparseMatrix(std::shared_ptr<const SparsityPattern> pattern)
    : pattern_(std::move(pattern)), values_(pattern_->nnz(), 0.0) {}

SparseMatrix::SparseMatrix(std::shared_ptr<const SparsityPattern> pattern,
                           std::vector<double> values)
    : pattern_(std::move(pattern)), values_(std::move(values)) {
  if (values_.size() != pattern_->nnz())
    throw std::invalid_argument("SparseMatrix: value count does not match pattern");
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
  if (row >= rows() || col >= cols()) throw std::out_of_range("SparseMatrix::at");
  const std::size_t k = pattern_->find(row, col);
  return k == nnz() ? 0.0 : values_[k];
}

void SparseMatrix::add(std::size_t row, std::size_t col, double value) {
  const std::size_t k = pattern_->find(row, col);
  if (k == nnz()) throw std::out_of_range("SparseMatrix::add: entry outside pattern");
  values_[k] += value;
}

Vector SparseMatrix::multiply(std::span<const double> x) const {
  Vector y(rows(), 0.0);
  multiply_add(x, y);
  return y;
}

void SparseMatrix::multiply_add(std::span<const double> x, std::span<double> y,
                                double scale) const {
  if (x.size() != cols() || y.size() != rows())
    throw std::invalid_argument("SparseMatrix::multiply: dimension mismatch");
  const auto& p = *pattern_;
  for (std::size_t i = 0; i < p.n_rows; ++i) {
    double acc = 0.0;
    for (std::size_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k)
      acc += values_[k] * x[p.columns[k]];
    y[i] += scale * acc;
  }
}

double SparseMatrix::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double SparseMatrix::asymmetry() const {
  const auto& p = *pattern_;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.n_rows; ++i) {
    for (std::size_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k) {
      const std::size_t j = p.columns[k];
      const std::size_t kt = p.find(j, i);
      const double transposed = kt == p.nnz() ? 0.0 : values_[kt];
      worst = std::max(worst, std::abs(values_[k] - transposed));
    }
  }
  return worst;
}

bool SparseMatrix::same_pattern(const SparseMatrix& other) const {
  if (pattern_ == other.pattern_) return true;
  if (!pattern_ || !other.pattern_) return false;
  return pattern_->n_rows == other.pattern_->n_rows && pattern_->n_cols == other.pattern_->n_cols &&
         pattern_->row_offsets == other.pattern_->row_offsets &&
         pattern_->columns == other.pattern_->columns;
}

SparseMatrix& SparseMatrix::add_scaled(const SparseMatrix& other, double scale) {
  if (!same_pattern(other)) throw std::invalid_argument("SparseMatrix::add_scaled: pattern mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += scale * other.values_[k];
  return *this;
}

SparseMatrix& SparseMatrix::scale(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> dense(rows() * cols(), 0.0);
  const auto& p = *pattern_;
  for (std::size_t i = 0; i < p.n_rows; ++i)
    for (std::size_t k = p.row_offsets[i]; k < p.row_offsets[i + 1]; ++k)
      dense[i * p.n_cols + p.columns[k]] = values_[k];
  return dense;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace chblend
