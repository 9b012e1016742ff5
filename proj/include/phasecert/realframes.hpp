#pragma once

// Real frames: the finite complement property. A real frame gives injective
// intensity measurements iff for every index subset S, either the vectors in
// S or the vectors in its complement span R^M.

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "phasecert/dense.hpp"
#include "phasecert/frame.hpp"
#include "phasecert/numeric.hpp"

namespace phasecert {

/// True iff the columns of `vectors` (M x k) span R^M. An empty set spans
/// nothing.
template <Scalar T>
bool spans(const Dense<T>& vectors) {
  if (vectors.cols() == 0 || vectors.cols() < vectors.rows()) return false;
  if constexpr (is_exact_v<T>)
    return exact::rank(vectors) == vectors.rows();
  else
    return numerical_rank(to_eigen(vectors)) == vectors.rows();
}

struct FcpResult {
  bool holds = true;
  std::vector<std::size_t> failing_subset;  // zero-based indices of S when !holds
};

inline constexpr std::size_t kFcpMaxVectors = 24;

template <Scalar T>
bool is_real_frame(const Frame<T>& frame) {
  for (std::size_t r = 0; r < frame.m(); ++r)
    for (std::size_t c = 0; c < frame.n(); ++c)
      if (!is_zero(frame.v()(r, c))) return false;
  return true;
}

/// Exhaustive check over all subsets with |S| <= N/2; each such S is tested
/// together with its complement, which covers every partition.
template <Scalar T>
FcpResult finite_complement_property(const Frame<T>& frame) {
  if (!is_real_frame(frame)) throw std::invalid_argument("finite_complement_property: frame is not real");
  const std::size_t n = frame.n();
  if (n > kFcpMaxVectors)
    throw std::invalid_argument("finite_complement_property: N = " + std::to_string(n) +
                                " exceeds the exhaustive limit of " + std::to_string(kFcpMaxVectors));
  const Dense<T>& u = frame.u();
  std::vector<std::size_t> in, out;
  const std::uint32_t full = (std::uint32_t{1} << n) - 1;
  for (std::uint32_t mask = 0; mask <= full; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) * 2 > n) continue;
    in.clear();
    out.clear();
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? in : out).push_back(i);
    if (spans(u.select_columns(in)) || spans(u.select_columns(out))) continue;
    return FcpResult{false, in};
  }
  return FcpResult{};
}

}  // namespace phasecert
