#pragma once

// Closed-form decisions for the small cases:
//   (M, N) = (2, 4)  determinant of the 4 x 4 constraint Jacobian
//   (M, N) = (3, 8)  alternating 8 x 8 minors D, then det Q(D)
//   (M, N) = (2, 3)  any kernel element is a certificate
//   (M, N) = (3, 7)  a real root of the pencil cubic det(Q0 + t Q1)

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "phasecert/certificate.hpp"
#include "phasecert/constraints.hpp"
#include "phasecert/dense.hpp"
#include "phasecert/frame.hpp"
#include "phasecert/hermitian.hpp"
#include "phasecert/rank2search.hpp"

namespace phasecert {

/// Certificate verification tolerance for certificates built by exact tests.
inline constexpr double kExactCertificateTolerance = 1e-8;

/// A float-mode determinant counts as zero when |det| <= 1e-9 * prod of row norms.
inline constexpr double kDeterminantThreshold = 1e-9;

template <Scalar T>
struct ExactVerdict {
  Verdict verdict;
  T determinant{0};
  double zero_threshold = 0.0;  // float mode only: the Hadamard-scaled cutoff used
};

namespace detail {

inline void require_shape(const std::size_t m, const std::size_t n, std::size_t want_m, std::size_t want_n,
                          const char* who) {
  if (m != want_m || n != want_n)
    throw DimensionError(std::string(who) + ": requires (M, N) = (" + std::to_string(want_m) + ", " +
                         std::to_string(want_n) + "), got (" + std::to_string(m) + ", " + std::to_string(n) + ")");
}

inline double hadamard_scale(const Dense<double>& a) {
  double p = 1.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = 0.0;
    for (double x : a.row(r)) s += x * x;
    p *= std::sqrt(s);
  }
  return p;
}

template <Scalar T>
T determinant(const Dense<T>& a) {
  if constexpr (is_exact_v<T>)
    return exact::determinant(a);
  else
    return to_eigen(a).determinant();
}

/// Determinant of the 3 x 3 Hermitian matrix with the given coordinates; it
/// is real, and the imaginary part is returned separately as a check.
template <Scalar T>
std::pair<T, T> hermitian_det3(const HermitianCoords<T>& q) {
  auto e = [&](std::size_t l, std::size_t k) { return q.entry(l, k); };
  const Complex<T> d = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
                       e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
                       e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
  return {d.re, d.im};
}

template <Scalar T>
NonInjective certificate_from_kernel(const Frame<T>& frame, const HermitianCoords<T>& q) {
  std::optional<HermitianCoords<Rational>> exact;
  if constexpr (is_exact_v<T>) exact = q;
  return make_non_injective(frame.to_float(), q.to_float(), kExactCertificateTolerance, std::move(exact));
}

}  // namespace detail

/// (M, N) = (2, 4): nonzero Jacobian determinant means injective. Every
/// 2 x 2 matrix has rank <= 2, so a zero determinant gives a certificate
/// from any kernel element.
template <Scalar T>
ExactVerdict<T> det_test_m2n4(const Frame<T>& frame) {
  detail::require_shape(frame.m(), frame.n(), 2, 4, "det_test_m2n4");
  frame.require_spanning();
  const auto cm = constraint_matrix(frame);
  ExactVerdict<T> out{Indeterminate{}, detail::determinant(cm.a)};
  bool zero;
  if constexpr (is_exact_v<T>) {
    zero = is_zero(out.determinant);
  } else {
    out.zero_threshold = kDeterminantThreshold * detail::hadamard_scale(cm.a);
    zero = std::abs(out.determinant) <= out.zero_threshold;
  }
  if (!zero) {
    out.verdict = Injective{"Jacobian determinant is nonzero"};
    return out;
  }
  const auto kb = kernel_basis(cm);
  if (kb.empty()) {
    out.verdict = Indeterminate{"determinant below threshold " + double_to_string(out.zero_threshold) +
                                " but the system has no numerical kernel (ill-conditioned)"};
    return out;
  }
  try {
    out.verdict = detail::certificate_from_kernel(frame, kb.basis.front());
  } catch (const CertificateError& e) {
    out.verdict = Indeterminate{std::string("kernel element failed verification: ") + e.what()};
  }
  return out;
}

template <Scalar T>
struct M3N8Solution {
  Dense<T> jacobian;        // 8 x 9, rows are constraint rows
  std::vector<T> d;         // D_k = (-1)^k det(J without column k), k = 1..9
  HermitianCoords<T> q;     // X + iY read from D in coordinate order
};

/// Alternating-minor solution of the 8 x 9 system J z = 0. With columns
/// numbered 1..9, D_k = (-1)^k det(J^{k}); J * D = 0 holds identically
/// (expand the 9 x 9 matrix [J_n; J], which has a repeated row).
template <Scalar T>
M3N8Solution<T> solve_m3n8(const Frame<T>& frame) {
  detail::require_shape(frame.m(), frame.n(), 3, 8, "solve_m3n8");
  auto cm = constraint_matrix(frame);
  M3N8Solution<T> out{std::move(cm.a), std::vector<T>(9), HermitianCoords<T>(3)};
  for (std::size_t k = 0; k < 9; ++k) {
    const T minor = detail::determinant(out.jacobian.without_column(k));
    // zero-based k corresponds to (-1)^(k+1)
    out.d[k] = (k % 2 == 0) ? T(-minor) : minor;
  }
  out.q = HermitianCoords<T>(3, out.d);
  return out;
}

/// (M, N) = (3, 8): det Q(D) != 0 means injective; det = 0 with D != 0 gives
/// the certificate Q(D); D = 0 (rank-deficient Jacobian) is Indeterminate.
template <Scalar T>
ExactVerdict<T> det_test_m3n8(const Frame<T>& frame) {
  const auto sol = solve_m3n8(frame);
  frame.require_spanning();
  ExactVerdict<T> out{Indeterminate{}, detail::hermitian_det3(sol.q).first};
  bool d_zero, det_zero;
  if constexpr (is_exact_v<T>) {
    d_zero = sol.q.is_zero();
    det_zero = is_zero(out.determinant);
  } else {
    // Each D_k is an 8 x 8 minor, bounded by the product of the row norms of J.
    const double d_scale = detail::hadamard_scale(sol.jacobian);
    double d_norm = 0.0;
    for (double x : sol.d) d_norm = std::max(d_norm, std::abs(x));
    d_zero = d_norm <= kDeterminantThreshold * d_scale;
    const Eigen::MatrixXcd qm = hermitian_from_coords(sol.q);
    double p = 1.0;
    for (Eigen::Index r = 0; r < 3; ++r) p *= qm.row(r).norm();
    out.zero_threshold = kDeterminantThreshold * p;
    det_zero = std::abs(out.determinant) <= out.zero_threshold;
  }
  if (d_zero) {
    out.verdict = Indeterminate{"Jacobian rank deficient"};
    return out;
  }
  if (!det_zero) {
    out.verdict = Injective{"det Q(D) is nonzero"};
    return out;
  }
  try {
    out.verdict = detail::certificate_from_kernel(frame, sol.q);
  } catch (const CertificateError& e) {
    out.verdict = Indeterminate{std::string("Q(D) failed verification: ") + e.what()};
  }
  return out;
}

/// (M, N) = (2, 3): the 3 x 4 system always has a nonzero kernel, and every
/// Hermitian 2 x 2 matrix has rank <= 2.
template <Scalar T>
Verdict kernel_cert_m2n3(const Frame<T>& frame) {
  detail::require_shape(frame.m(), frame.n(), 2, 3, "kernel_cert_m2n3");
  frame.require_spanning();
  const auto kb = kernel_basis(constraint_matrix(frame));
  if (kb.empty()) throw std::logic_error("kernel_cert_m2n3: empty kernel for a 3 x 4 system");
  return detail::certificate_from_kernel(frame, kb.basis.front());
}

// ---------------------------------------------------------------------------
// Real roots of polynomials of degree <= 3.

/// Real roots of c[0] + c[1] t + c[2] t^2 + c[3] t^3, leading coefficients
/// whose magnitude is below 1e-13 * max|c| are treated as zero. Cubic roots
/// come from the closed form, classified by the discriminant, and are then
/// polished by safeguarded Newton steps on the original polynomial.
inline std::vector<double> real_roots_upto_cubic(const std::array<double, 4>& c) {
  double scale = 0.0;
  for (double x : c) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return {0.0};  // identically zero: every t is a root
  int deg = 3;
  while (deg > 0 && std::abs(c[static_cast<std::size_t>(deg)]) <= 1e-13 * scale) --deg;
  auto eval = [&](double t) { return ((c[3] * t + c[2]) * t + c[1]) * t + c[0]; };
  auto deriv = [&](double t) { return (3.0 * c[3] * t + 2.0 * c[2]) * t + c[1]; };

  std::vector<double> roots;
  if (deg == 0) return roots;
  if (deg == 1) {
    roots.push_back(-c[0] / c[1]);
  } else if (deg == 2) {
    const double disc = c[1] * c[1] - 4.0 * c[2] * c[0];
    if (disc < 0.0) return roots;
    const double sq = std::sqrt(disc);
    const double qv = -0.5 * (c[1] + std::copysign(sq, c[1]));
    if (qv != 0.0) roots.push_back(c[0] / qv);
    roots.push_back(qv / c[2]);
  } else {
    const double a = c[2] / c[3], b = c[1] / c[3], d = c[0] / c[3];
    // t = s - a/3 gives s^3 + p s + q = 0.
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + d;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc > 0.0) {
      const double sq = std::sqrt(disc);
      roots.push_back(std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq) - a / 3.0);
    } else if (p == 0.0) {
      roots.push_back(-a / 3.0);
    } else {
      const double r = 2.0 * std::sqrt(-p / 3.0);
      const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k) roots.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - a / 3.0);
    }
  }
  for (double& t : roots) {
    for (int it = 0; it < 60; ++it) {
      const double f = eval(t);
      if (std::abs(f) <= 1e-14 * scale) break;
      const double df = deriv(t);
      if (df == 0.0) break;
      const double next = t - f / df;
      if (!(std::abs(eval(next)) < std::abs(f))) {
        // Newton overshoots; bisect toward the root on [t, next] if bracketed.
        double lo = t, hi = next;
        if (eval(lo) * eval(hi) > 0.0) break;
        for (int b = 0; b < 200 && std::abs(eval(lo)) > 1e-14 * scale; ++b) {
          const double mid = 0.5 * (lo + hi);
          (eval(mid) * eval(lo) <= 0.0 ? hi : lo) = mid;
        }
        t = lo;
        break;
      }
      t = next;
    }
  }
  return roots;
}

struct PencilResult {
  Verdict verdict;
  std::array<cplx, 4> coefficients{};  // det(Q0 + t Q1) = sum_k c_k t^k
  double max_coefficient_imag = 0.0;
  bool reversed = false;               // true when det(Q1 + s Q0) was used
  double root = 0.0;
  bool used_search_fallback = false;
};

namespace detail {

inline Eigen::Matrix3cd adjugate3(const Eigen::Matrix3cd& a) {
  Eigen::Matrix3cd adj;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      adj(i, j) = a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0);
    }
  return adj;
}

}  // namespace detail

/// Coefficients of det(A + tB) for 3 x 3 matrices:
///   det A + t tr(adj(A) B) + t^2 tr(adj(B) A) + t^3 det B.
inline std::array<cplx, 4> pencil_cubic(const Eigen::Matrix3cd& a, const Eigen::Matrix3cd& b) {
  return {a.determinant(), (detail::adjugate3(a) * b).trace(), (detail::adjugate3(b) * a).trace(),
          b.determinant()};
}

/// (M, N) = (3, 7): L_Phi is generically a real plane {Q0, Q1}, and
/// det(Q0 + tQ1) is a real cubic, so it has a real root giving a rank <= 2
/// Hermitian certificate. Non-generic kernels fall back to the search.
inline PencilResult pencil_cubic_m3n7(const Frame<double>& frame, const SearchOptions& fallback = {}) {
  detail::require_shape(frame.m(), frame.n(), 3, 7, "pencil_cubic_m3n7");
  frame.require_spanning();
  PencilResult out{Indeterminate{}};
  const auto kb = kernel_basis(constraint_matrix(frame));
  auto fall_back = [&](const std::string& why) {
    out.used_search_fallback = true;
    auto res = alternating_search(frame, fallback);
    if (std::holds_alternative<NonInjective>(res.verdict))
      out.verdict = std::move(res.verdict);
    else
      out.verdict = Indeterminate{why + "; search fallback found no certificate"};
    return out;
  };
  if (kb.dim() != 2) return fall_back("kernel dimension " + std::to_string(kb.dim()) + " != 2");

  const Eigen::Matrix3cd q0 = hermitian_from_coords(kb.basis[0]);
  const Eigen::Matrix3cd q1 = hermitian_from_coords(kb.basis[1]);
  out.coefficients = pencil_cubic(q0, q1);
  std::array<double, 4> c{};
  for (std::size_t k = 0; k < 4; ++k) {
    c[k] = out.coefficients[k].real();
    out.max_coefficient_imag = std::max(out.max_coefficient_imag, std::abs(out.coefficients[k].imag()));
  }
  double scale = 0.0;
  for (double x : c) scale = std::max(scale, std::abs(x));
  std::array<double, 4> poly = c;
  if (std::abs(c[3]) <= 1e-13 * scale) {
    out.reversed = true;
    poly = {c[3], c[2], c[1], c[0]};
  }
  const auto roots = real_roots_upto_cubic(poly);

  // Several real roots may exist; keep the one whose matrix is closest to rank two.
  std::optional<NonInjective> best;
  double best_rank = std::numeric_limits<double>::infinity();
  for (double t : roots) {
    std::vector<double> coords(9);
    for (std::size_t i = 0; i < 9; ++i)
      coords[i] = out.reversed ? kb.basis[1][i] + t * kb.basis[0][i] : kb.basis[0][i] + t * kb.basis[1][i];
    try {
      auto ni = make_non_injective(frame, HermitianCoords<double>(3, coords), kExactCertificateTolerance);
      if (ni.certificate.rank_residual < best_rank) {
        best_rank = ni.certificate.rank_residual;
        out.root = t;
        best = std::move(ni);
      }
    } catch (const CertificateError&) {
    }
  }
  if (!best) return fall_back("no real root of the pencil cubic produced a verified certificate");
  out.verdict = std::move(*best);
  return out;
}

}  // namespace phasecert
