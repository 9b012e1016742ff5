#pragma once

// The intensity map x -> (|<x, phi_n>|^2)_n and the phase-quotient metric.
// Inner products are <x, y> = sum_m x_m conj(y_m) throughout.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "phasecert/frame.hpp"
#include "phasecert/numeric.hpp"

namespace phasecert {

template <Scalar T>
std::vector<T> intensity_measurements(const Frame<T>& frame, std::span<const Complex<T>> x) {
  if (x.size() != frame.m())
    throw DimensionError("intensity_measurements: vector length " + std::to_string(x.size()) +
                         " does not match frame dimension " + std::to_string(frame.m()));
  std::vector<T> out(frame.n());
  for (std::size_t n = 0; n < frame.n(); ++n) {
    Complex<T> ip;
    for (std::size_t m = 0; m < frame.m(); ++m) ip = ip + x[m] * frame.entry(m, n).conj();
    out[n] = ip.norm();
  }
  return out;
}

inline Eigen::VectorXd intensity_measurements(const Frame<double>& frame, const Eigen::VectorXcd& x) {
  if (static_cast<std::size_t>(x.size()) != frame.m())
    throw DimensionError("intensity_measurements: vector length does not match frame dimension");
  // phi_n^* x for every n at once.
  const Eigen::VectorXcd ip = frame.complex_matrix().adjoint() * x;
  return ip.cwiseAbs2();
}

/// min over theta of ||x - e^{i theta} y||, in closed form.
inline double phase_distance(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  if (x.size() != y.size()) throw DimensionError("phase_distance: length mismatch");
  const double d2 = x.squaredNorm() + y.squaredNorm() - 2.0 * std::abs(y.dot(x));
  return std::sqrt(std::max(d2, 0.0));
}

}  // namespace phasecert
