#pragma once

// Eigen bridges and float-mode rank decisions.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <vector>

#include "phasecert/dense.hpp"

namespace phasecert {

using cplx = std::complex<double>;

/// Relative singular-value threshold used for every float-mode rank decision.
inline constexpr double kRankThreshold = 1e-9;

inline Eigen::MatrixXd to_eigen(const Dense<double>& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
  return out;
}

inline Dense<double> from_eigen(const Eigen::MatrixXd& a) {
  Dense<double> out(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out(r, c) = a(r, c);
  return out;
}

/// Number of singular values above `rel * sigma_max`. Zero matrices have rank 0.
template <typename Derived>
std::size_t numerical_rank(const Eigen::MatrixBase<Derived>& a, double rel = kRankThreshold) {
  if (a.size() == 0) return 0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(a.eval());
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rel * s(0)) ++r;
  return r;
}

inline std::vector<cplx> to_std(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

inline Eigen::VectorXcd to_eigen(const std::vector<cplx>& v) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

}  // namespace phasecert
