#pragma once

// Scalar plumbing shared by the float and exact code paths.
//
// Every templated routine in phasecert is instantiated for exactly two scalar
// types: `double` (float mode) and `Rational` (exact mode, GMP rationals).

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace phasecert {

using Rational = mpq_class;
using BigInt = mpz_class;

enum class ScalarMode { Float, Rational };

template <typename T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <typename T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, Rational>;

template <Scalar T>
constexpr ScalarMode scalar_mode_of() {
  return is_exact_v<T> ? ScalarMode::Rational : ScalarMode::Float;
}

inline std::string to_string(ScalarMode mode) {
  return mode == ScalarMode::Float ? "float" : "rational";
}

inline ScalarMode parse_scalar_mode(std::string_view s) {
  if (s == "float") return ScalarMode::Float;
  if (s == "rational") return ScalarMode::Rational;
  throw std::invalid_argument("unknown scalar mode '" + std::string(s) + "'");
}

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.get_d(); }

inline double abs_value(double x) { return std::fabs(x); }
inline double abs_value(const Rational& x) { return std::fabs(x.get_d()); }

inline bool is_zero(double x) { return x == 0.0; }
inline bool is_zero(const Rational& x) { return sgn(x) == 0; }

/// Canonical text form: "p/q" (or "p" when the denominator is 1).
inline std::string rational_to_string(const Rational& x) { return x.get_str(); }

/// Parses "p/q", "p", or a finite decimal such as "-0.25" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  if (s.front() == '+') s.erase(s.begin());
  try {
    if (auto dot = s.find('.'); dot != std::string::npos) {
      if (s.find_first_of("eE/") != std::string::npos)
        throw std::invalid_argument("unsupported rational literal '" + s + "'");
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      if (digits.empty() || digits == "-") throw std::invalid_argument("bad decimal '" + s + "'");
      const auto scale = s.size() - dot - 1;
      Rational q(BigInt(digits, 10), BigInt(1));
      BigInt den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(scale));
      q /= den;
      q.canonicalize();
      return q;
    }
    Rational q(s, 10);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("malformed rational literal '" + s + "'");
  }
}

/// Shortest round-trip text for a double.
inline std::string double_to_string(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace phasecert
