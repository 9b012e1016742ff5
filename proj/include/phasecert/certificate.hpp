#pragma once

// Non-injectivity certificates, colliding witness pairs, and verdicts.
//
// A certificate is a nonzero Hermitian Q with rank(Q) <= 2 and
// phi_n^* Q phi_n = 0 for every frame vector. On a spanning frame such a Q
// has exactly one positive and one negative eigenvalue, so Q = xx* - yy*
// and x, y produce identical intensity measurements.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "phasecert/frame.hpp"
#include "phasecert/hermitian.hpp"
#include "phasecert/measurement.hpp"
#include "phasecert/numeric.hpp"

namespace phasecert {

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CertificateDiagnostics {
  std::vector<double> row_residuals;  // |phi_n^* Q phi_n|
  double linear_residual = 0.0;       // max of row_residuals
  std::size_t worst_row = 0;
  double rank_residual = 0.0;         // third largest singular value
  double hermitian_deviation = 0.0;   // max |Q - Q^*|
  double frobenius_norm = 0.0;
  bool passed = false;
};

/// Recomputes every residual of Q against the frame from scratch. Thresholds
/// are relative to ||Q||_F; the zero matrix never passes.
inline CertificateDiagnostics verify_certificate(const Frame<double>& frame, const Eigen::MatrixXcd& q,
                                                 double tol, bool require_hermitian = true) {
  const auto m = static_cast<Eigen::Index>(frame.m());
  if (q.rows() != m || q.cols() != m) throw DimensionError("verify_certificate: Q must be m x m");
  CertificateDiagnostics d;
  const Eigen::MatrixXcd phi = frame.complex_matrix();
  d.row_residuals.resize(frame.n());
  for (std::size_t n = 0; n < frame.n(); ++n) {
    const auto col = phi.col(static_cast<Eigen::Index>(n));
    const double r = std::abs(col.dot(q * col));
    d.row_residuals[n] = r;
    if (r > d.linear_residual) {
      d.linear_residual = r;
      d.worst_row = n;
    }
  }
  d.frobenius_norm = q.norm();
  d.hermitian_deviation = (q - q.adjoint()).cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(q);
  const auto& s = svd.singularValues();
  d.rank_residual = s.size() > 2 ? s(2) : 0.0;
  const double scale = d.frobenius_norm;
  d.passed = scale > 0.0 && d.linear_residual <= tol * scale && d.rank_residual <= tol * scale &&
             (!require_hermitian || d.hermitian_deviation <= tol * scale);
  return d;
}

struct WitnessPair {
  Eigen::VectorXcd x;
  Eigen::VectorXcd y;
};

/// Splits a signature-(1,1) Hermitian Q into x x* - y y* using its extreme
/// eigenpairs. Throws CertificateError when Q is (numerically) semidefinite.
inline WitnessPair witness_from_certificate(const Eigen::MatrixXcd& q, double tol = 1e-9) {
  if (q.rows() != q.cols()) throw DimensionError("witness_from_certificate: Q is not square");
  const double scale = q.norm();
  if (scale == 0.0) throw CertificateError("witness_from_certificate: zero matrix");
  const Eigen::MatrixXcd h = 0.5 * (q + q.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const auto& ev = es.eigenvalues();  // ascending
  const double lo = ev(0);
  const double hi = ev(ev.size() - 1);
  if (hi <= tol * scale || lo >= -tol * scale)
    throw CertificateError("certificate inconsistent with spanning frame: Q is semidefinite");
  WitnessPair w;
  w.x = std::sqrt(hi) * es.eigenvectors().col(ev.size() - 1);
  w.y = std::sqrt(-lo) * es.eigenvectors().col(0);
  return w;
}

/// max_n |A(x)_n - A(y)_n|, and the scale max(||A(x)||_inf, 1) it is judged against.
struct WitnessCheck {
  double max_gap = 0.0;
  double scale = 1.0;
  double separation = 0.0;  // ||xx* - yy*||_F
  bool agrees(double rel_tol) const { return max_gap <= rel_tol * scale; }
};

inline WitnessCheck check_witness(const Frame<double>& frame, const WitnessPair& w) {
  const Eigen::VectorXd ax = intensity_measurements(frame, w.x);
  const Eigen::VectorXd ay = intensity_measurements(frame, w.y);
  WitnessCheck c;
  c.max_gap = (ax - ay).cwiseAbs().maxCoeff();
  c.scale = std::max(ax.cwiseAbs().maxCoeff(), 1.0);
  c.separation = (w.x * w.x.adjoint() - w.y * w.y.adjoint()).norm();
  return c;
}

struct Certificate {
  HermitianCoords<double> q;                       // unit Frobenius norm
  std::optional<HermitianCoords<Rational>> exact;  // leading coordinate 1
  double linear_residual = 0.0;
  double rank_residual = 0.0;
  double frobenius_norm = 0.0;

  Eigen::MatrixXcd matrix() const { return hermitian_from_coords(q); }
};

/// Complex-mode result: a general (not necessarily Hermitian) rank <= 2
/// matrix annihilated by all the frame's quadratic forms.
struct ComplexCertificate {
  Eigen::MatrixXcd q;  // unit Frobenius norm
  double linear_residual = 0.0;
  double rank_residual = 0.0;
  double hermitian_deviation = 0.0;
};

struct BudgetReport {
  std::size_t restarts = 0;
  std::size_t max_iters = 0;
  std::size_t iterations_used = 0;
  double best_linear_residual = 0.0;
  double best_rank_residual = 0.0;
  std::string note = "no certificate found within budget";
};

struct Injective {
  std::string reason;
};

struct NonInjective {
  Certificate certificate;
  WitnessPair witness;
};

struct Indeterminate {
  std::string reason;
};

struct NotFound {
  BudgetReport budget;
};

using Verdict = std::variant<Injective, NonInjective, Indeterminate, NotFound>;

inline std::string tag_name(const Verdict& v) {
  return std::visit(
      [](const auto& alt) -> std::string {
        using A = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<A, Injective>) return "Injective";
        else if constexpr (std::is_same_v<A, NonInjective>) return "NonInjective";
        else if constexpr (std::is_same_v<A, Indeterminate>) return "Indeterminate";
        else return "NotFound";
      },
      v);
}

/// Witness agreement threshold, relative to max(||A(x)||_inf, 1).
inline constexpr double kWitnessTolerance = 1e-8;

/// Normalizes Q, verifies it against the frame, extracts and checks a
/// witness. Every NonInjective verdict is built here, so none can carry an
/// unverified certificate. Throws CertificateError on any failed check.
inline NonInjective make_non_injective(const Frame<double>& frame, const HermitianCoords<double>& raw,
                                       double tol,
                                       std::optional<HermitianCoords<Rational>> exact = std::nullopt) {
  Certificate cert;
  cert.q = normalize_frobenius(raw);
  const Eigen::MatrixXcd q = cert.matrix();
  const auto diag = verify_certificate(frame, q, tol);
  cert.linear_residual = diag.linear_residual;
  cert.rank_residual = diag.rank_residual;
  cert.frobenius_norm = diag.frobenius_norm;
  if (!diag.passed)
    throw CertificateError("certificate failed verification (linear residual " +
                           double_to_string(diag.linear_residual) + ", rank residual " +
                           double_to_string(diag.rank_residual) + ")");
  if (exact) cert.exact = normalize_leading(std::move(*exact));
  WitnessPair w = witness_from_certificate(q);
  const auto check = check_witness(frame, w);
  if (!check.agrees(kWitnessTolerance))
    throw CertificateError("witness measurements disagree by " + double_to_string(check.max_gap));
  return NonInjective{std::move(cert), std::move(w)};
}

}  // namespace phasecert
