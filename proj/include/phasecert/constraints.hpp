#pragma once

// The realified linear system phi_n^* Q phi_n = 0 in Hermitian coordinates
// and its kernel L_Phi.

#include <cstddef>
#include <span>
#include <vector>

#include "phasecert/dense.hpp"
#include "phasecert/frame.hpp"
#include "phasecert/hermitian.hpp"
#include "phasecert/numeric.hpp"

namespace phasecert {

/// Coefficients of phi^* Q phi (phi = u + iv) in Hermitian coordinate order:
///   x_mm : u_m^2 + v_m^2
///   x_lm : 2 (u_l u_m + v_l v_m)
///   y_lm : 2 (u_m v_l - u_l v_m)
template <Scalar T>
std::vector<T> constraint_row(std::span<const T> u, std::span<const T> v) {
  if (u.size() != v.size()) throw DimensionError("constraint_row: u and v differ in length");
  const std::size_t m = u.size();
  std::vector<T> row(hermitian_dim(m), T(0));
  for (std::size_t l = 0; l < m; ++l) {
    row[x_index(m, l, l)] = u[l] * u[l] + v[l] * v[l];
    for (std::size_t k = l + 1; k < m; ++k) {
      row[x_index(m, l, k)] = T(2) * (u[l] * u[k] + v[l] * v[k]);
      row[y_index(m, l, k)] = T(2) * (u[k] * v[l] - u[l] * v[k]);
    }
  }
  return row;
}

template <Scalar T>
struct ConstraintMatrix {
  std::size_t m = 0;
  Dense<T> a;  // N x M^2

  std::size_t rows() const { return a.rows(); }
  std::size_t cols() const { return a.cols(); }

  /// (phi_n^* Q phi_n)_n for the matrix with the given coordinates.
  std::vector<T> apply(const HermitianCoords<T>& q) const { return a.multiply(q.coords()); }
};

template <Scalar T>
ConstraintMatrix<T> constraint_matrix(const Frame<T>& frame) {
  ConstraintMatrix<T> cm{frame.m(), Dense<T>(frame.n(), hermitian_dim(frame.m()))};
  for (std::size_t n = 0; n < frame.n(); ++n) {
    const auto u = frame.u().column(n);
    const auto v = frame.v().column(n);
    const auto row = constraint_row<T>(u, v);
    std::copy(row.begin(), row.end(), cm.a.row(n).begin());
  }
  return cm;
}

template <Scalar T>
struct KernelBasis {
  std::size_t m = 0;
  std::vector<HermitianCoords<T>> basis;
  bool orthonormal = false;  // Euclidean-orthonormal in coordinates (float mode)

  std::size_t dim() const { return basis.size(); }
  bool empty() const { return basis.empty(); }
};

/// Float mode: right singular vectors with singular value below
/// 1e-9 * sigma_max. Rational mode: the canonical RREF nullspace basis.
template <Scalar T>
KernelBasis<T> kernel_basis(const ConstraintMatrix<T>& cm) {
  KernelBasis<T> kb{cm.m, {}, false};
  const std::size_t d = cm.cols();
  if constexpr (is_exact_v<T>) {
    for (auto& v : exact::nullspace(cm.a)) kb.basis.emplace_back(cm.m, std::move(v));
  } else {
    kb.orthonormal = true;
    if (cm.rows() == 0) {
      for (std::size_t i = 0; i < d; ++i) {
        HermitianCoords<double> e(cm.m);
        e[i] = 1.0;
        kb.basis.push_back(std::move(e));
      }
      return kb;
    }
    const Eigen::MatrixXd a = to_eigen(cm.a);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? kRankThreshold * s(0) : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > cutoff && s(i) > 0.0) ++rank;
    const Eigen::MatrixXd& v = svd.matrixV();
    for (std::size_t j = rank; j < d; ++j) {
      std::vector<double> c(d);
      for (std::size_t i = 0; i < d; ++i) c[i] = v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      kb.basis.emplace_back(cm.m, std::move(c));
    }
  }
  return kb;
}

template <Scalar T>
std::size_t kernel_dimension(const Frame<T>& frame) {
  return kernel_basis(constraint_matrix(frame)).dim();
}

}  // namespace phasecert
