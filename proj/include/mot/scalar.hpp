#pragma once

#include <gmpxx.h>

#include <cmath>
#include <concepts>
#include <string>
#include <string_view>

namespace mot {

using Rational = mpq_class;

// The two numeric modes: exact rationals for certification and doubles for
// the approximate paths.
template <class T>
concept Scalar = std::same_as<T, Rational> || std::same_as<T, double>;

template <Scalar T>
constexpr bool is_exact_v = std::same_as<T, Rational>;

inline double to_double(const Rational& x) { return x.get_d(); }
inline double to_double(double x) { return x; }

template <Scalar T>
T from_rational(const Rational& x) {
  if constexpr (is_exact_v<T>) {
    return x;
  } else {
    return x.get_d();
  }
}

template <Scalar T>
T abs_value(const T& x) {
  if constexpr (is_exact_v<T>) {
    return abs(x);
  } else {
    return std::fabs(x);
  }
}

template <Scalar T>
bool is_finite(const T& x) {
  if constexpr (is_exact_v<T>) {
    return true;
  } else {
    return std::isfinite(x);
  }
}

/// Comparison slack used when a caller does not pass one: zero for
/// rationals, 1e-9 * (1 + sup_norm) for doubles.
template <Scalar T>
T default_tolerance(const T& sup_norm) {
  if constexpr (is_exact_v<T>) {
    return Rational(0);
  } else {
    return 1e-9 * (1.0 + sup_norm);
  }
}

/// Parses "p/q", integers, and decimals with optional exponent
/// ("-1.25", "3e-2") into an exact rational. Throws Error(schema) on junk.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when the denominator is 1).
std::string to_exact_string(const Rational& x);

/// Exact value of a finite double as a rational.
Rational rational_from_double(double x);

}  // namespace mot
