#include "mot/scalar.hpp"

#include <cctype>
#include <cstdlib>

#include "mot/error.hpp"

namespace mot {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorKind::schema, "not a number: '" + std::string(text) + "'");
}

Rational pow10(long exponent) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  if (exponent >= 0) return Rational(p);
  Rational r(mpz_class(1), p);
  r.canonicalize();
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) bad_number(text);

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }

  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash);
    std::string_view den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad_number(text);
    mpz_class p(std::string(num), 10);
    mpz_class q(std::string(den), 10);
    if (q == 0) throw Error(ErrorKind::schema, "zero denominator in '" + std::string(text) + "'");
    value = Rational(p, q);
    value.canonicalize();
  } else {
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      std::string_view exp_part = s.substr(e + 1);
      bool exp_negative = false;
      if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
        exp_negative = exp_part.front() == '-';
        exp_part.remove_prefix(1);
      }
      if (!all_digits(exp_part) || exp_part.size() > 6) bad_number(text);
      exponent = std::strtol(std::string(exp_part).c_str(), nullptr, 10);
      if (exp_negative) exponent = -exponent;
      s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      std::string_view whole = s.substr(0, dot);
      std::string_view frac = s.substr(dot + 1);
      if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
          (whole.empty() && frac.empty())) {
        bad_number(text);
      }
      digits = std::string(whole) + std::string(frac);
      exponent -= static_cast<long>(frac.size());
    } else {
      if (!all_digits(s)) bad_number(text);
      digits = std::string(s);
    }
    value = Rational(mpz_class(digits, 10)) * pow10(exponent);
    value.canonicalize();
  }
  if (negative) value = -value;
  return value;
}

std::string to_exact_string(const Rational& x) {
  Rational y = x;
  y.canonicalize();
  if (y.get_den() == 1) return y.get_num().get_str();
  return y.get_str();
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorKind::schema, "non-finite number");
  }
  Rational r(x);
  r.canonicalize();
  return r;
}

}  // namespace mot
