#pragma once

// Real coordinates of Hermitian matrices Q = X + iY.
//
// Layout (length M^2): the upper triangle of X row by row including the
// diagonal, then the strict upper triangle of Y row by row:
//   x11 x12 .. x1M x22 .. x2M .. xMM | y12 .. y1M y23 .. y(M-1)M

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phasecert/dense.hpp"
#include "phasecert/frame.hpp"
#include "phasecert/numeric.hpp"

namespace phasecert {

inline std::size_t hermitian_dim(std::size_t m) { return m * m; }

/// Position of x_{lm} (l <= m, zero-based) in the coordinate vector.
inline std::size_t x_index(std::size_t m, std::size_t l, std::size_t k) {
  if (l > k) std::swap(l, k);
  return l * m - l * (l - 1) / 2 + (k - l);
}

/// Position of y_{lm} (l < m, zero-based).
inline std::size_t y_index(std::size_t m, std::size_t l, std::size_t k) {
  return m * (m + 1) / 2 + l * m - l * (l + 1) / 2 + (k - l - 1);
}

/// Frobenius weight of each coordinate: 1 on the diagonal, 2 off it, since
/// each off-diagonal coordinate appears twice in the dense matrix.
inline std::vector<double> frobenius_weights(std::size_t m) {
  std::vector<double> w(hermitian_dim(m), 2.0);
  for (std::size_t l = 0; l < m; ++l) w[x_index(m, l, l)] = 1.0;
  return w;
}

template <Scalar T>
class HermitianCoords {
 public:
  HermitianCoords() = default;
  explicit HermitianCoords(std::size_t m) : m_(m), c_(hermitian_dim(m), T(0)) {}
  HermitianCoords(std::size_t m, std::vector<T> coords) : m_(m), c_(std::move(coords)) {
    if (c_.size() != hermitian_dim(m)) throw DimensionError("hermitian coords: length must be m^2");
  }

  std::size_t m() const { return m_; }
  const std::vector<T>& coords() const { return c_; }
  std::vector<T>& coords() { return c_; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  T& operator[](std::size_t i) { return c_[i]; }

  /// Symmetric part entry X_{lk}.
  T x(std::size_t l, std::size_t k) const { return c_[x_index(m_, l, k)]; }

  /// Skew part entry Y_{lk}.
  T y(std::size_t l, std::size_t k) const {
    if (l == k) return T(0);
    return l < k ? c_[y_index(m_, l, k)] : T(-c_[y_index(m_, k, l)]);
  }

  Complex<T> entry(std::size_t l, std::size_t k) const { return {x(l, k), y(l, k)}; }

  bool is_zero() const {
    for (const auto& c : c_)
      if (!phasecert::is_zero(c)) return false;
    return true;
  }

  /// sum of weighted squares, i.e. ||Q||_F^2 (exact in rational mode).
  T frobenius_norm_squared() const {
    T s(0);
    for (std::size_t l = 0; l < m_; ++l)
      for (std::size_t k = l; k < m_; ++k) {
        const T& a = c_[x_index(m_, l, k)];
        s += (l == k ? T(1) : T(2)) * a * a;
        if (l < k) {
          const T& b = c_[y_index(m_, l, k)];
          s += T(2) * b * b;
        }
      }
    return s;
  }

  HermitianCoords<double> to_float() const {
    std::vector<double> d(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) d[i] = to_double(c_[i]);
    return HermitianCoords<double>(m_, std::move(d));
  }

  friend bool operator==(const HermitianCoords&, const HermitianCoords&) = default;

 private:
  std::size_t m_ = 0;
  std::vector<T> c_;
};

inline Eigen::MatrixXcd hermitian_from_coords(const HermitianCoords<double>& q) {
  const auto m = static_cast<Eigen::Index>(q.m());
  Eigen::MatrixXcd out(m, m);
  for (Eigen::Index l = 0; l < m; ++l)
    for (Eigen::Index k = 0; k < m; ++k) out(l, k) = cplx(q.x(l, k), q.y(l, k));
  return out;
}

/// Inverse of hermitian_from_coords. Throws when ||Q - Q*||_max exceeds tol.
inline HermitianCoords<double> coords_from_hermitian(const Eigen::MatrixXcd& q, double tol = 1e-12) {
  if (q.rows() != q.cols()) throw DimensionError("coords_from_hermitian: matrix is not square");
  if ((q - q.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("coords_from_hermitian: matrix is not Hermitian");
  const auto m = static_cast<std::size_t>(q.rows());
  HermitianCoords<double> out(m);
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t k = l; k < m; ++k) {
      const cplx avg = 0.5 * (q(l, k) + std::conj(q(k, l)));
      out[x_index(m, l, k)] = l == k ? q(l, l).real() : avg.real();
      if (l < k) out[y_index(m, l, k)] = avg.imag();
    }
  return out;
}

/// Scales to unit Frobenius norm (float mode).
inline HermitianCoords<double> normalize_frobenius(HermitianCoords<double> q) {
  const double nrm = std::sqrt(q.frobenius_norm_squared());
  if (nrm == 0.0) throw std::invalid_argument("normalize_frobenius: zero matrix");
  for (auto& c : q.coords()) c /= nrm;
  return q;
}

/// Canonical projective representative in rational mode: the first nonzero
/// coordinate becomes 1.
inline HermitianCoords<Rational> normalize_leading(HermitianCoords<Rational> q) {
  for (const auto& c : q.coords()) {
    if (!is_zero(c)) {
      const Rational lead = c;
      for (auto& x : q.coords()) x /= lead;
      return q;
    }
  }
  throw std::invalid_argument("normalize_leading: zero matrix");
}

}  // namespace phasecert
