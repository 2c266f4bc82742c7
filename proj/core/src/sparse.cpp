#include "lagraph/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lagraph/execution.hpp"

namespace lagraph {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw std::out_of_range("sparse entry (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") outside " + shape_string(rows, cols));
    }
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix s(rows, cols);
  s.col_idx_.reserve(triplets.size());
  s.values_.reserve(triplets.size());
  std::vector<std::size_t> counts(rows, 0);
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& t = triplets[i];
    if (i > 0 && triplets[i - 1].row == t.row && triplets[i - 1].col == t.col) {
      s.values_.back() += t.value;
      continue;
    }
    s.col_idx_.push_back(t.col);
    s.values_.push_back(t.value);
    ++counts[t.row];
  }
  for (std::size_t r = 0; r < rows; ++r) s.row_ptr_[r + 1] = s.row_ptr_[r] + counts[r];
  return s;
}

SparseMatrix SparseMatrix::from_dense(const Matrix& m) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (m(i, j) != 0.0) t.push_back({i, j, m(i, j)});
  return from_triplets(m.rows(), m.cols(), std::move(t));
}

std::span<const std::size_t> SparseMatrix::row_cols(std::size_t r) const {
  return std::span<const std::size_t>(col_idx_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

std::span<const double> SparseMatrix::row_values(std::size_t r) const {
  return std::span<const double>(values_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return row_values(r)[static_cast<std::size_t>(it - cols.begin())];
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    auto cols = row_cols(r);
    auto vals = row_values(r);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (std::abs(at(cols[i], r) - vals[i]) > tol) return false;
    }
  }
  return true;
}

Matrix SparseMatrix::to_dense() const {
  Matrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto cols = row_cols(r);
    auto vals = row_values(r);
    for (std::size_t i = 0; i < cols.size(); ++i) d(r, cols[i]) = vals[i];
  }
  return d;
}

SparseMatrix SparseMatrix::transposed() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    auto cols = row_cols(r);
    auto vals = row_values(r);
    for (std::size_t i = 0; i < cols.size(); ++i) t.push_back({cols[i], r, vals[i]});
  }
  return from_triplets(cols_, rows_, std::move(t));
}

Matrix SparseMatrix::multiply(const Matrix& d) const {
  if (cols_ != d.rows()) {
    throw ShapeError("spmm: sparse " + shape_string(rows_, cols_) + " times dense " +
                     shape_string(d.rows(), d.cols()));
  }
  const std::size_t n = d.cols();
  Matrix out(rows_, n);
  parallel_for(0, rows_, 256, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t r = lo; r < hi; ++r) {
      auto orow = out.row(r);
      for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
        const double v = values_[p];
        auto drow = d.row(col_idx_[p]);
        for (std::size_t j = 0; j < n; ++j) orow[j] += v * drow[j];
      }
    }
  });
  return out;
}

Matrix SparseMatrix::transpose_multiply(const Matrix& d) const {
  if (rows_ != d.rows()) {
    throw ShapeError("spmm_t: sparse " + shape_string(rows_, cols_) + " transposed times dense " +
                     shape_string(d.rows(), d.cols()));
  }
  const std::size_t n = d.cols();
  Matrix out(cols_, n);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto drow = d.row(r);
    for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      const double v = values_[p];
      auto orow = out.row(col_idx_[p]);
      for (std::size_t j = 0; j < n; ++j) orow[j] += v * drow[j];
    }
  }
  return out;
}

}  // namespace lagraph
