#pragma once

// A minimal row-major dense matrix plus the exact elimination routines used in
// rational mode. Float-mode numerics go through Eigen instead (see numeric.hpp).

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phasecert/scalar.hpp"

namespace phasecert {

template <Scalar T>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const T& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  void set_column(std::size_t c, std::span<const T> values) {
    if (values.size() != rows_) throw std::invalid_argument("set_column: length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
  }

  Dense without_column(std::size_t skip) const {
    Dense out(rows_, cols_ - 1);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0, k = 0; c < cols_; ++c)
        if (c != skip) out(r, k++) = (*this)(r, c);
    return out;
  }

  Dense select_columns(std::span<const std::size_t> cols) const {
    Dense out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = 0; k < cols.size(); ++k) out(r, k) = (*this)(r, cols[k]);
    return out;
  }

  std::vector<T> multiply(std::span<const T> x) const {
    if (x.size() != cols_) throw std::invalid_argument("multiply: length mismatch");
    std::vector<T> y(rows_, T(0));
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) y[r] += (*this)(r, c) * x[c];
    return y;
  }

  friend bool operator==(const Dense& a, const Dense& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <Scalar T, Scalar S>
Dense<T> convert(const Dense<S>& a) {
  Dense<T> out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      if constexpr (std::is_same_v<T, double>)
        out(r, c) = to_double(a(r, c));
      else
        out(r, c) = T(a(r, c));
    }
  return out;
}

namespace exact {

/// Reduced row echelon form over an exact field. Returns pivot columns.
template <Scalar T>
  requires is_exact_v<T>
std::vector<std::size_t> rref_in_place(Dense<T>& a) {
  std::vector<std::size_t> pivots;
  std::size_t lead_row = 0;
  for (std::size_t c = 0; c < a.cols() && lead_row < a.rows(); ++c) {
    std::size_t p = lead_row;
    while (p < a.rows() && is_zero(a(p, c))) ++p;
    if (p == a.rows()) continue;
    if (p != lead_row)
      for (std::size_t k = 0; k < a.cols(); ++k) std::swap(a(p, k), a(lead_row, k));
    const T inv = T(1) / a(lead_row, c);
    for (std::size_t k = c; k < a.cols(); ++k) a(lead_row, k) *= inv;
    for (std::size_t r = 0; r < a.rows(); ++r) {
      if (r == lead_row || is_zero(a(r, c))) continue;
      const T f = a(r, c);
      for (std::size_t k = c; k < a.cols(); ++k) a(r, k) -= f * a(lead_row, k);
    }
    pivots.push_back(c);
    ++lead_row;
  }
  return pivots;
}

template <Scalar T>
  requires is_exact_v<T>
std::size_t rank(Dense<T> a) {
  return rref_in_place(a).size();
}

/// Determinant by Gaussian elimination with first-nonzero pivoting.
template <Scalar T>
  requires is_exact_v<T>
T determinant(Dense<T> a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix is not square");
  const std::size_t n = a.rows();
  T det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && is_zero(a(p, c))) ++p;
    if (p == n) return T(0);
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a(p, k), a(c, k));
      det = -det;
    }
    det *= a(c, c);
    const T inv = T(1) / a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (is_zero(a(r, c))) continue;
      const T f = a(r, c) * inv;
      for (std::size_t k = c + 1; k < n; ++k) a(r, k) -= f * a(c, k);
    }
  }
  return det;
}

/// Canonical nullspace basis: one vector per free column, with a 1 in that
/// column and zeros in every other free column.
template <Scalar T>
  requires is_exact_v<T>
std::vector<std::vector<T>> nullspace(Dense<T> a) {
  const auto pivots = rref_in_place(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t free = 0; free < a.cols(); ++free) {
    if (is_pivot[free]) continue;
    std::vector<T> v(a.cols(), T(0));
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace exact
}  // namespace phasecert
