#pragma once

// Numerical search for rank <= 2 points of L_Phi by alternating projections
// between the linear space L_Phi and the rank <= 2 matrices.
//
// Hermitian mode looks for a real certificate of non-injectivity. Complex
// mode looks for any complex rank <= 2 matrix Q with phi_n^* Q phi_n = 0,
// which always exists once N <= 4M - 5 but says nothing about real
// non-injectivity on its own.

#include <algorithm>
#include <limits>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "phasecert/certificate.hpp"
#include "phasecert/constraints.hpp"
#include "phasecert/frame.hpp"
#include "phasecert/hermitian.hpp"
#include "phasecert/rng.hpp"

namespace phasecert {

enum class SearchMode { Hermitian, Complex };

inline std::string to_string(SearchMode m) { return m == SearchMode::Hermitian ? "hermitian" : "complex"; }

inline SearchMode parse_search_mode(std::string_view s) {
  if (s == "hermitian") return SearchMode::Hermitian;
  if (s == "complex") return SearchMode::Complex;
  throw std::invalid_argument("unknown search mode '" + std::string(s) + "'");
}

struct SearchOptions {
  SearchMode mode = SearchMode::Hermitian;
  double tol = 1e-10;
  std::size_t max_iters = 2000;
  std::size_t restarts = 50;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("search options: tol must be positive");
    if (max_iters < 1) throw std::invalid_argument("search options: max_iters must be at least 1");
    if (restarts < 1) throw std::invalid_argument("search options: restarts must be at least 1");
  }
};

/// Nearest rank <= 2 matrix in Frobenius norm. Hermitian mode keeps the two
/// eigenvalues of largest magnitude; ties go to the lower index in ascending
/// eigenvalue order. Complex mode truncates the SVD.
inline Eigen::MatrixXcd project_rank2(const Eigen::MatrixXcd& q, SearchMode mode) {
  const Eigen::Index m = q.rows();
  if (m <= 2) return q;
  if (mode == SearchMode::Hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (q + q.adjoint()));
    const auto& ev = es.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(ev(a)) > std::abs(ev(b)); });
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(m, m);
    for (int k = 0; k < 2; ++k) {
      const auto i = order[static_cast<std::size_t>(k)];
      const Eigen::VectorXcd v = es.eigenvectors().col(i);
      out += ev(i) * v * v.adjoint();
    }
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(q, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  return svd.matrixU().leftCols(2) * s.head(2).asDiagonal() * svd.matrixV().leftCols(2).adjoint();
}

/// Frobenius-orthogonal projector onto span(basis) in Hermitian coordinates.
/// The coordinate inner product is reweighted (off-diagonal coordinates count
/// twice) so that the projection is orthogonal for Re tr(A^* B).
class HermitianSubspace {
 public:
  explicit HermitianSubspace(const KernelBasis<double>& kb) : m_(kb.m) {
    const auto d = static_cast<Eigen::Index>(hermitian_dim(m_));
    const auto k = static_cast<Eigen::Index>(kb.dim());
    basis_.resize(d, k);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < d; ++i) basis_(i, j) = kb.basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    const auto w = frobenius_weights(m_);
    weights_ = Eigen::Map<const Eigen::VectorXd>(w.data(), d);
    if (k > 0) {
      // Frobenius-orthonormalize: basis_ <- basis_ * G^{-1/2}.
      const Eigen::MatrixXd gram = basis_.transpose() * weights_.asDiagonal() * basis_;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
      const Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
      basis_ = basis_ * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
    }
  }

  std::size_t m() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }

  /// Coordinates alpha with Q = sum_j alpha_j B_j; ||Q||_F = ||alpha||.
  Eigen::VectorXd reduce(const Eigen::VectorXd& coords) const {
    return basis_.transpose() * weights_.asDiagonal() * coords;
  }
  Eigen::VectorXd expand(const Eigen::VectorXd& alpha) const { return basis_ * alpha; }

  Eigen::VectorXd project(const Eigen::VectorXd& coords) const { return expand(reduce(coords)); }

 private:
  std::size_t m_;
  Eigen::MatrixXd basis_;
  Eigen::VectorXd weights_;
};

inline Eigen::VectorXd to_vector(const HermitianCoords<double>& c) {
  return Eigen::Map<const Eigen::VectorXd>(c.coords().data(), static_cast<Eigen::Index>(c.coords().size()));
}

inline HermitianCoords<double> to_coords(std::size_t m, const Eigen::VectorXd& v) {
  return HermitianCoords<double>(m, std::vector<double>(v.data(), v.data() + v.size()));
}

/// Orthogonal projection of Q onto L_Phi (Frobenius inner product). An
/// empty basis projects everything to zero.
inline Eigen::MatrixXcd project_linear(const Eigen::MatrixXcd& q, const KernelBasis<double>& kb) {
  const auto m = static_cast<std::size_t>(q.rows());
  if (kb.empty()) return Eigen::MatrixXcd::Zero(q.rows(), q.cols());
  const HermitianSubspace sub(kb);
  const auto c = coords_from_hermitian(0.5 * (q + q.adjoint()), std::numeric_limits<double>::infinity());
  return hermitian_from_coords(to_coords(m, sub.project(to_vector(c))));
}

/// Complex kernel of Q -> (phi_n^* Q phi_n)_n acting on vec(Q) (row-major),
/// as an orthonormal basis of C^{M^2} columns.
inline Eigen::MatrixXcd complex_kernel(const Frame<double>& frame) {
  const auto m = static_cast<Eigen::Index>(frame.m());
  const auto n = static_cast<Eigen::Index>(frame.n());
  const Eigen::MatrixXcd phi = frame.complex_matrix();
  Eigen::MatrixXcd a(n, m * m);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index l = 0; l < m; ++l)
      for (Eigen::Index k = 0; k < m; ++k) a(r, l * m + k) = std::conj(phi(l, r)) * phi(k, r);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kRankThreshold * s(0) && s(i) > 0.0) ++rank;
  return svd.matrixV().rightCols(m * m - rank);
}

struct SearchTrace {
  std::size_t restart = 0;          // restart index that succeeded
  std::size_t iterations = 0;       // total iterations over all restarts
  std::vector<double> step_norms;   // ||Q_{k+1} - Q_k||_F on the successful restart
};

struct SearchOutcome {
  Verdict verdict;
  std::optional<ComplexCertificate> complex_point;  // complex mode only
  SearchTrace trace;
  std::size_t kernel_dim = 0;
};

namespace detail {

inline Eigen::VectorXd random_unit(Rng& rng, Eigen::Index d) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = standard_normal(rng);
  return v / v.norm();
}

inline Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index m) {
  Eigen::MatrixXcd q(m, m);
  for (Eigen::Index l = 0; l < m; ++l)
    for (Eigen::Index k = 0; k < m; ++k) q(l, k) = v(l * m + k);
  return q;
}

inline Eigen::VectorXcd vec(const Eigen::MatrixXcd& q) {
  const Eigen::Index m = q.rows();
  Eigen::VectorXcd v(m * m);
  for (Eigen::Index l = 0; l < m; ++l)
    for (Eigen::Index k = 0; k < m; ++k) v(l * m + k) = q(l, k);
  return v;
}

inline double third_singular_value(const Eigen::MatrixXcd& q) {
  if (q.rows() <= 2) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(q);
  return svd.singularValues()(2);
}


/// Newton refinement for a Hermitian pencil point. With Q = sum_j a_j B_j and
/// W spanning the eigenvectors of the M-2 smallest |eigenvalues|, the
/// rank-two condition is W^* Q W = 0, whose derivative is W^* dQ W because
/// W^* Q U_2 = 0 for the leading eigenvectors U_2. The unit-norm constraint
/// on a closes the system. Returns true when the rank residual reaches tol.
inline bool newton_polish_hermitian(const HermitianSubspace& sub, Eigen::VectorXd& alpha, double tol,
                                    int max_steps = 30) {
  const std::size_t m = sub.m();
  const auto mi = static_cast<Eigen::Index>(m);
  const Eigen::Index k = mi - 2;
  const auto d = static_cast<Eigen::Index>(sub.dim());
  std::vector<Eigen::MatrixXcd> dirs;
  dirs.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j)
    dirs.push_back(hermitian_from_coords(to_coords(m, sub.expand(Eigen::VectorXd::Unit(d, j)))));

  Eigen::VectorXd a = alpha;
  double prev = std::numeric_limits<double>::infinity();
  for (int step = 0; step <= max_steps; ++step) {
    const Eigen::MatrixXcd q = hermitian_from_coords(to_coords(m, sub.expand(a)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q);
    const auto& ev = es.eigenvalues();
    std::vector<Eigen::Index> order(m);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return std::abs(ev(x)) > std::abs(ev(y)); });
    const double res = std::abs(ev(order[2]));
    if (res <= tol) {
      alpha = a;
      return true;
    }
    if (step == max_steps || !(res < 2.0 * prev)) return false;
    prev = res;
    Eigen::MatrixXcd w(mi, k);
    for (Eigen::Index i = 0; i < k; ++i) w.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i + 2)]);

    // Real equations: upper triangle of the k x k Hermitian block (real diag,
    // re/im off-diagonal), then a . delta = 0.
    const Eigen::Index rows = k * k + 1;
    Eigen::MatrixXd jac(rows, d);
    Eigen::VectorXd rhs(rows);
    auto fill = [&](const Eigen::MatrixXcd& block, auto&& put) {
      Eigen::Index r = 0;
      for (Eigen::Index p = 0; p < k; ++p) {
        put(r++, block(p, p).real());
        for (Eigen::Index s = p + 1; s < k; ++s) {
          put(r++, block(p, s).real());
          put(r++, block(p, s).imag());
        }
      }
    };
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::MatrixXcd blk = w.adjoint() * dirs[static_cast<std::size_t>(j)] * w;
      fill(blk, [&](Eigen::Index r, double val) { jac(r, j) = val; });
      jac(rows - 1, j) = a(j);
    }
    const Eigen::MatrixXcd cur = w.adjoint() * q * w;
    fill(cur, [&](Eigen::Index r, double val) { rhs(r) = -val; });
    rhs(rows - 1) = 0.0;
    const Eigen::VectorXd delta = jac.completeOrthogonalDecomposition().solve(rhs);
    a += delta;
    a.normalize();
  }
  return false;
}

/// Complex analogue of newton_polish_hermitian, on singular subspaces:
/// L^* Q R = 0 with L, R the trailing left/right singular vectors.
inline bool newton_polish_complex(const Eigen::MatrixXcd& basis, Eigen::Index m, Eigen::VectorXcd& alpha,
                                  double tol, int max_steps = 30) {
  const Eigen::Index k = m - 2;
  const Eigen::Index d = basis.cols();
  std::vector<Eigen::MatrixXcd> dirs;
  for (Eigen::Index j = 0; j < d; ++j) dirs.push_back(unvec(basis.col(j), m));
  Eigen::VectorXcd a = alpha;
  double prev = std::numeric_limits<double>::infinity();
  for (int step = 0; step <= max_steps; ++step) {
    const Eigen::MatrixXcd q = unvec(basis * a, m);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double res = svd.singularValues()(2);
    if (res <= tol) {
      alpha = a;
      return true;
    }
    if (step == max_steps || !(res < 2.0 * prev)) return false;
    prev = res;
    const Eigen::MatrixXcd left = svd.matrixU().rightCols(k);
    const Eigen::MatrixXcd right = svd.matrixV().rightCols(k);
    const Eigen::Index rows = k * k + 1;
    Eigen::MatrixXcd jac(rows, d);
    Eigen::VectorXcd rhs(rows);
    for (Eigen::Index j = 0; j < d; ++j) {
      const Eigen::MatrixXcd blk = left.adjoint() * dirs[static_cast<std::size_t>(j)] * right;
      jac.col(j).head(k * k) = blk.reshaped();
      jac(rows - 1, j) = std::conj(a(j));
    }
    const Eigen::MatrixXcd cur = left.adjoint() * q * right;
    rhs.head(k * k) = -cur.reshaped();
    rhs(rows - 1) = 0.0;
    const Eigen::VectorXcd delta = jac.completeOrthogonalDecomposition().solve(rhs);
    a += delta;
    a.normalize();
  }
  return false;
}

}  // namespace detail

/// Budgeted alternating projection. Each restart starts from a random unit
/// vector of L_Phi and iterates Q <- normalize(P_rank2(P_L(Q))). Whenever
/// the rank residual first drops below a new power of ten (from 1e-2 down),
/// a Newton refinement is attempted from the current iterate; the plain
/// iteration only converges linearly, often slowly, near tangential
/// intersections. A restart succeeds when Q in L_Phi, normalized, is within
/// tol of rank two. Restarts run in index order and the first success wins.
///
/// NotFound means only that the budget ran out. The one exception is
/// L_Phi = 0, which proves injectivity and yields Injective.
inline SearchOutcome alternating_search(const Frame<double>& frame, const SearchOptions& opts) {
  opts.validate();
  SearchOutcome out{NotFound{}, std::nullopt, {}, 0};
  const auto m = static_cast<Eigen::Index>(frame.m());
  BudgetReport budget;
  budget.restarts = opts.restarts;
  budget.max_iters = opts.max_iters;
  budget.best_linear_residual = std::numeric_limits<double>::infinity();
  budget.best_rank_residual = std::numeric_limits<double>::infinity();
  constexpr double kFirstPolish = 1e-2;

  if (opts.mode == SearchMode::Hermitian) {
    const auto kb = kernel_basis(constraint_matrix(frame));
    out.kernel_dim = kb.dim();
    if (kb.empty()) {
      out.verdict = Injective{"L_Phi = 0: no nonzero Hermitian matrix satisfies the constraints"};
      return out;
    }
    const HermitianSubspace sub(kb);
    const auto d = static_cast<Eigen::Index>(sub.dim());
    auto accept = [&](const Eigen::VectorXd& alpha, std::size_t r, std::vector<double>& steps) {
      try {
        out.verdict = make_non_injective(frame, to_coords(frame.m(), sub.expand(alpha)), 100 * opts.tol);
        out.trace.restart = r;
        out.trace.step_norms = std::move(steps);
        return true;
      } catch (const CertificateError&) {
        return false;
      }
    };
    for (std::size_t r = 0; r < opts.restarts; ++r) {
      auto rng = make_rng(derive_seed(opts.seed, r));
      Eigen::VectorXd alpha = detail::random_unit(rng, d);
      std::vector<double> steps;
      double polish_below = kFirstPolish;
      bool rejected = false;
      for (std::size_t it = 0; it < opts.max_iters && !rejected; ++it) {
        ++out.trace.iterations;
        const Eigen::MatrixXcd q = hermitian_from_coords(to_coords(frame.m(), sub.expand(alpha)));
        const double rank_res = detail::third_singular_value(q);
        budget.best_rank_residual = std::min(budget.best_rank_residual, rank_res);
        if (rank_res <= opts.tol) {
          if (accept(alpha, r, steps)) return out;
          rejected = true;  // numerically semidefinite or failed witness; try another start
          break;
        }
        if (rank_res < polish_below) {
          while (polish_below > rank_res) polish_below /= 10.0;
          Eigen::VectorXd polished = alpha;
          if (detail::newton_polish_hermitian(sub, polished, opts.tol)) {
            if (accept(polished, r, steps)) return out;
          }
        }
        const Eigen::MatrixXcd p = project_rank2(q, SearchMode::Hermitian);
        const auto pc = coords_from_hermitian(p, std::numeric_limits<double>::infinity());
        Eigen::VectorXd next = sub.reduce(to_vector(pc));
        const double nrm = next.norm();
        if (nrm == 0.0) break;
        next /= nrm;
        const double step = (next - alpha).norm();
        steps.push_back(step);
        alpha = next;
        if (step < 1e-15) break;  // stalled at a fixed point that is not rank two
      }
    }
    budget.iterations_used = out.trace.iterations;
    out.verdict = NotFound{budget};
    return out;
  }

  // Complex mode.
  const Eigen::MatrixXcd basis = complex_kernel(frame);
  out.kernel_dim = static_cast<std::size_t>(basis.cols());
  if (basis.cols() == 0) {
    out.verdict = Injective{"L_Phi = 0: no nonzero matrix satisfies the constraints"};
    return out;
  }
  auto accept = [&](const Eigen::VectorXcd& alpha, std::size_t r, std::vector<double>& steps) {
    const Eigen::MatrixXcd q = detail::unvec(basis * alpha, m);
    ComplexCertificate cc;
    cc.q = q / q.norm();
    const auto diag = verify_certificate(frame, cc.q, 100 * opts.tol, false);
    cc.linear_residual = diag.linear_residual;
    cc.rank_residual = diag.rank_residual;
    cc.hermitian_deviation = diag.hermitian_deviation;
    if (!diag.passed) return false;
    out.complex_point = cc;
    out.verdict = Indeterminate{
        "complex rank <= 2 point of L_Phi found; this does not by itself decide real injectivity"};
    out.trace.restart = r;
    out.trace.step_norms = std::move(steps);
    return true;
  };
  for (std::size_t r = 0; r < opts.restarts; ++r) {
    auto rng = make_rng(derive_seed(opts.seed, r));
    Eigen::VectorXcd alpha(basis.cols());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) alpha(i) = cplx(standard_normal(rng), standard_normal(rng));
    alpha.normalize();
    std::vector<double> steps;
    double polish_below = kFirstPolish;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
      ++out.trace.iterations;
      const Eigen::MatrixXcd q = detail::unvec(basis * alpha, m);
      const double rank_res = detail::third_singular_value(q);
      budget.best_rank_residual = std::min(budget.best_rank_residual, rank_res);
      if (rank_res <= opts.tol) {
        if (accept(alpha, r, steps)) return out;
        break;
      }
      if (rank_res < polish_below && m > 2) {
        while (polish_below > rank_res) polish_below /= 10.0;
        Eigen::VectorXcd polished = alpha;
        if (detail::newton_polish_complex(basis, m, polished, opts.tol) && accept(polished, r, steps)) return out;
      }
      const Eigen::MatrixXcd p = project_rank2(q, SearchMode::Complex);
      Eigen::VectorXcd next = basis.adjoint() * detail::vec(p);
      const double nrm = next.norm();
      if (nrm == 0.0) break;
      next /= nrm;
      // Fix the global phase so that step norms measure real movement.
      const cplx ph = next.dot(alpha);
      if (std::abs(ph) > 0.0) next *= ph / std::abs(ph);
      const double step = (next - alpha).norm();
      steps.push_back(step);
      alpha = next;
      if (step < 1e-15) break;
    }
  }
  budget.iterations_used = out.trace.iterations;
  out.verdict = NotFound{budget};
  return out;
}

}  // namespace phasecert
