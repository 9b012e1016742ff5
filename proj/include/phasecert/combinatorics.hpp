#pragma once

// Degree of the rank <= 2 determinantal variety and its 2-adic valuation.
// Everything here is exact integer / rational arithmetic.
//
//   d_{M,2} = prod_{i=0}^{M-3} C(M+i, 2) / C(2+i, 2)
//
// v_2(C(n+r, r)) = s_2(n) + s_2(r) - s_2(n+r) (Kummer), where s_p is the
// base-p digit sum.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "phasecert/scalar.hpp"

namespace phasecert {

struct DegreeReport {
  std::uint64_t m = 0;
  BigInt degree;
  std::int64_t two_adic_valuation = 0;
  bool is_odd = false;
  bool is_power_of_two_plus_one = false;
  std::uint64_t expected_resultant_exponent = 0;  // (M-2)^2
};

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

/// Product formula, evaluated over exact rationals and checked integral.
inline BigInt degree_rank2(std::uint64_t m) {
  if (m < 2) throw std::invalid_argument("degree_rank2: m must be at least 2");
  Rational d(1);
  for (std::uint64_t i = 0; i + 3 <= m; ++i) d *= Rational(binomial(m + i, 2), binomial(2 + i, 2));
  d.canonicalize();
  if (d.get_den() != 1) throw std::logic_error("degree_rank2: product is not an integer");
  return d.get_num();
}

/// Sum of the base-p digits of n.
inline std::uint64_t digit_sum(const BigInt& n, std::uint64_t p) {
  if (p < 2) throw std::invalid_argument("digit_sum: base must be at least 2");
  if (n < 0) throw std::invalid_argument("digit_sum: n must be nonnegative");
  BigInt rest = n;
  BigInt digit;
  std::uint64_t s = 0;
  while (rest != 0) {
    digit = rest % p;
    s += digit.get_ui();
    rest /= p;
  }
  return s;
}

inline std::uint64_t digit_sum(std::uint64_t n, std::uint64_t p) { return digit_sum(BigInt(n), p); }

/// Exponent of 2 in a nonzero integer, by repeated division.
inline std::int64_t two_adic_valuation(BigInt n) {
  if (n == 0) throw std::invalid_argument("two_adic_valuation: zero has infinite valuation");
  std::int64_t v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  return v;
}

/// v_2(C(n+r, r)) via digit sums.
inline std::int64_t binomial_two_adic_valuation(std::uint64_t n, std::uint64_t r) {
  return static_cast<std::int64_t>(digit_sum(n, 2) + digit_sum(r, 2)) -
         static_cast<std::int64_t>(digit_sum(n + r, 2));
}

/// v_2(d_{M,2}) from digit sums alone, one Kummer term per binomial in the
/// product: each factor contributes
///   [s2(M+i-2) + s2(2) - s2(M+i)] - [s2(i) + s2(2) - s2(i+2)].
inline std::int64_t degree_parity_via_digits(std::uint64_t m) {
  if (m < 2) throw std::invalid_argument("degree_parity_via_digits: m must be at least 2");
  auto s2 = [](std::uint64_t x) { return static_cast<std::int64_t>(digit_sum(x, 2)); };
  std::int64_t v = 0;
  for (std::uint64_t i = 0; i + 3 <= m; ++i) {
    v += binomial_two_adic_valuation(m + i - 2, 2);  // C(M+i, 2)
    v -= binomial_two_adic_valuation(i, 2);          // C(2+i, 2)
  }
  // Same quantity with the telescoped digit sums written out.
  std::int64_t w = 0;
  for (std::uint64_t i = 0; i + 3 <= m; ++i) w += (s2(m + i - 2) - s2(m + i)) + (s2(i + 2) - s2(i));
  if (v != w) throw std::logic_error("degree_parity_via_digits: summation forms disagree");
  return v;
}

/// The four surviving terms when M = 2^k + 1:
///   (s2(M-2) - s2(M)) + (s2(M-1) - s2(M-3)),
/// which equals v_2(d_{M,2}) for such M. Requires m >= 3.
inline std::int64_t four_term_valuation(std::uint64_t m) {
  if (m < 3) throw std::invalid_argument("four_term_valuation: m must be at least 3");
  auto s2 = [](std::uint64_t x) { return static_cast<std::int64_t>(digit_sum(x, 2)); };
  return (s2(m - 2) - s2(m)) + (s2(m - 1) - s2(m - 3));
}

inline bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

/// Bound below which phase retrieval is never injective: 4m - 2 s2(m-1) - 4.
inline std::int64_t hmw_bound(std::uint64_t m) {
  if (m < 2) throw std::invalid_argument("hmw_bound: m must be at least 2");
  return 4 * static_cast<std::int64_t>(m) - 2 * static_cast<std::int64_t>(digit_sum(m - 1, 2)) - 4;
}

inline DegreeReport degree_report(std::uint64_t m) {
  DegreeReport r;
  r.m = m;
  r.degree = degree_rank2(m);
  r.two_adic_valuation = two_adic_valuation(r.degree);
  r.is_odd = r.degree % 2 != 0;
  r.is_power_of_two_plus_one = is_power_of_two(m - 1);
  r.expected_resultant_exponent = (m - 2) * (m - 2);
  return r;
}

}  // namespace phasecert
