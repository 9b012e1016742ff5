#pragma once

// Frames: N vectors in C^M stored as real and imaginary parts (U, V).

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "phasecert/dense.hpp"
#include "phasecert/numeric.hpp"
#include "phasecert/rng.hpp"
#include "phasecert/scalar.hpp"

namespace phasecert {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complex number over either scalar type. std::complex is only specified
/// for floating-point element types, so exact code uses this instead.
template <Scalar T>
struct Complex {
  T re{0};
  T im{0};

  Complex conj() const { return {re, -im}; }
  T norm() const { return re * re + im * im; }

  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend bool operator==(const Complex&, const Complex&) = default;
};

template <Scalar T>
class Frame {
 public:
  /// Takes ownership of the real and imaginary parts. Shapes must agree and
  /// M >= 2, N >= 1. Rank deficiency is recorded, not rejected; use
  /// `require_spanning()` where the frame property is a precondition.
  Frame(Dense<T> u, Dense<T> v) : u_(std::move(u)), v_(std::move(v)) {
    if (u_.rows() != v_.rows() || u_.cols() != v_.cols())
      throw DimensionError("frame: real and imaginary parts differ in shape");
    if (u_.rows() < 2) throw DimensionError("frame: dimension m must be at least 2");
    if (u_.cols() < 1) throw DimensionError("frame: need at least one vector");
    rank_ = compute_rank();
  }

  std::size_t m() const { return u_.rows(); }
  std::size_t n() const { return u_.cols(); }
  const Dense<T>& u() const { return u_; }
  const Dense<T>& v() const { return v_; }
  static constexpr ScalarMode mode() { return scalar_mode_of<T>(); }

  std::size_t rank() const { return rank_; }
  bool is_spanning() const { return rank_ == m(); }

  const Frame& require_spanning() const {
    if (!is_spanning())
      throw FrameError("frame vectors do not span C^" + std::to_string(m()) + " (rank " +
                       std::to_string(rank_) + ")");
    return *this;
  }

  Complex<T> entry(std::size_t row, std::size_t col) const { return {u_(row, col), v_(row, col)}; }

  std::vector<Complex<T>> vector(std::size_t col) const {
    std::vector<Complex<T>> out(m());
    for (std::size_t r = 0; r < m(); ++r) out[r] = entry(r, col);
    return out;
  }

  /// The frame A * Phi for a complex M x M matrix A = ar + i ai.
  Frame left_multiply(const Dense<T>& ar, const Dense<T>& ai) const {
    if (ar.rows() != m() || ar.cols() != m() || ai.rows() != m() || ai.cols() != m())
      throw DimensionError("left_multiply: transform must be m x m");
    Dense<T> u(m(), n()), v(m(), n());
    for (std::size_t r = 0; r < m(); ++r)
      for (std::size_t c = 0; c < n(); ++c) {
        T re(0), im(0);
        for (std::size_t k = 0; k < m(); ++k) {
          re += ar(r, k) * u_(k, c) - ai(r, k) * v_(k, c);
          im += ar(r, k) * v_(k, c) + ai(r, k) * u_(k, c);
        }
        u(r, c) = re;
        v(r, c) = im;
      }
    return Frame(std::move(u), std::move(v));
  }

  /// Multiplies column `col` by the complex scalar s.
  Frame scale_column(std::size_t col, const Complex<T>& s) const {
    if (col >= n()) throw DimensionError("scale_column: column out of range");
    Dense<T> u = u_, v = v_;
    for (std::size_t r = 0; r < m(); ++r) {
      const auto z = s * entry(r, col);
      u(r, col) = z.re;
      v(r, col) = z.im;
    }
    return Frame(std::move(u), std::move(v));
  }

  Frame<double> to_float() const {
    if constexpr (std::is_same_v<T, double>)
      return *this;
    else
      return Frame<double>(convert<double>(u_), convert<double>(v_));
  }

  /// Phi = U + iV as an Eigen matrix (float mode view).
  Eigen::MatrixXcd complex_matrix() const {
    Eigen::MatrixXcd phi(m(), n());
    for (std::size_t r = 0; r < m(); ++r)
      for (std::size_t c = 0; c < n(); ++c) phi(r, c) = cplx(to_double(u_(r, c)), to_double(v_(r, c)));
    return phi;
  }

  friend bool operator==(const Frame& a, const Frame& b) { return a.u_ == b.u_ && a.v_ == b.v_; }

 private:
  std::size_t compute_rank() const {
    if constexpr (is_exact_v<T>) {
      // rank_C(U + iV) is half the real rank of [[U, -V], [V, U]].
      Dense<T> big(2 * m(), 2 * n());
      for (std::size_t r = 0; r < m(); ++r)
        for (std::size_t c = 0; c < n(); ++c) {
          big(r, c) = u_(r, c);
          big(r, c + n()) = -v_(r, c);
          big(r + m(), c) = v_(r, c);
          big(r + m(), c + n()) = u_(r, c);
        }
      return exact::rank(std::move(big)) / 2;
    } else {
      return numerical_rank(complex_matrix());
    }
  }

  Dense<T> u_;
  Dense<T> v_;
  std::size_t rank_ = 0;
};

/// Builds a frame from its column vectors phi_1..phi_N.
template <Scalar T>
Frame<T> frame_from_columns(const std::vector<std::vector<Complex<T>>>& columns) {
  if (columns.empty()) throw DimensionError("frame: need at least one vector");
  const std::size_t m = columns.front().size();
  Dense<T> u(m, columns.size()), v(m, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != m) throw DimensionError("frame: vectors have different lengths");
    for (std::size_t r = 0; r < m; ++r) {
      u(r, c) = columns[c][r].re;
      v(r, c) = columns[c][r].im;
    }
  }
  return Frame<T>(std::move(u), std::move(v));
}

namespace detail {

/// Range of the numerator and denominator of sampled rational entries.
inline constexpr std::int64_t kRationalNumeratorBound = 1000;
inline constexpr std::int64_t kRationalDenominatorBound = 32;

template <Scalar T>
T sample_entry(Rng& rng) {
  if constexpr (is_exact_v<T>) {
    const auto p = uniform_int(rng, -kRationalNumeratorBound, kRationalNumeratorBound);
    const auto q = uniform_int(rng, 1, kRationalDenominatorBound);
    Rational r(static_cast<long>(p), static_cast<unsigned long>(q));
    r.canonicalize();
    return r;
  } else {
    return standard_normal(rng);
  }
}

}  // namespace detail

/// Random frame, deterministic in `seed`. Float mode draws i.i.d. standard
/// normal real and imaginary parts; rational mode draws p/q with
/// |p| <= 1000 and 1 <= q <= 32. Rank-deficient draws are resampled.
template <Scalar T>
Frame<T> random_frame(std::size_t m, std::size_t n, std::uint64_t seed) {
  if (m < 2) throw DimensionError("random_frame: m must be at least 2");
  if (n < 1) throw DimensionError("random_frame: n must be at least 1");
  auto rng = make_rng(seed);
  const std::size_t want_rank = std::min(m, n);
  for (int attempt = 0; attempt < 10; ++attempt) {
    Dense<T> u(m, n), v(m, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < m; ++r) {
        u(r, c) = detail::sample_entry<T>(rng);
        v(r, c) = detail::sample_entry<T>(rng);
      }
    Frame<T> f(std::move(u), std::move(v));
    if (f.rank() == want_rank) return f;
  }
  throw FrameError("random_frame: persistent rank deficiency");
}

/// Random real frame (imaginary parts zero).
template <Scalar T>
Frame<T> random_real_frame(std::size_t m, std::size_t n, std::uint64_t seed) {
  auto rng = make_rng(seed);
  const std::size_t want_rank = std::min(m, n);
  for (int attempt = 0; attempt < 10; ++attempt) {
    Dense<T> u(m, n), v(m, n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t r = 0; r < m; ++r) u(r, c) = detail::sample_entry<T>(rng);
    Frame<T> f(std::move(u), std::move(v));
    if (f.rank() == want_rank) return f;
  }
  throw FrameError("random_real_frame: persistent rank deficiency");
}

}  // namespace phasecert
