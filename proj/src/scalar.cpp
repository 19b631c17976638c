#include "demandsig/scalar.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace demandsig {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Rational pow10(long e) {
  boost::multiprecision::mpz_int p = 1;
  for (long i = 0; i < (e < 0 ? -e : e); ++i) p *= 10;
  return e < 0 ? Rational(1) / Rational(p) : Rational(p);
}

Rational parse_decimal(std::string_view s, std::string_view original) {
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    std::string_view exp_part = s.substr(epos + 1);
    s = s.substr(0, epos);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '+' || exp_part.front() == '-')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (!all_digits(exp_part) || exp_part.size() > 6) {
      throw std::invalid_argument("malformed number: " + std::string(original));
    }
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) || (!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part))) {
    throw std::invalid_argument("malformed number: " + std::string(original));
  }
  std::string digits = std::string(int_part) + std::string(frac_part);
  // A leading zero would make the string constructor read octal.
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  Rational value{boost::multiprecision::mpz_int(digits)};
  value *= pow10(exponent - static_cast<long>(frac_part.size()));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(trim(s.substr(0, slash)), text);
    Rational den = parse_decimal(trim(s.substr(slash + 1)), text);
    if (den == 0) throw std::invalid_argument("zero denominator: " + std::string(text));
    return num / den;
  }
  return parse_decimal(s, text);
}

std::string to_string(const Rational& v) { return v.str(); }

std::string to_string(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Rational approximate_rational(double v, std::int64_t max_denominator, double tol) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value");
  using boost::multiprecision::mpz_int;
  mpz_int p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = v;
  Rational best{mpz_int(static_cast<std::int64_t>(std::floor(v)))};
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(x);
    mpz_int ai(static_cast<std::int64_t>(a));
    mpz_int p2 = ai * p1 + p0;
    mpz_int q2 = ai * q1 + q0;
    if (q2 > max_denominator) break;
    best = Rational(p2) / Rational(q2);
    if (std::abs(to_double(best) - v) <= tol) break;
    double frac = x - a;
    if (frac <= 0) break;
    x = 1.0 / frac;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  return best;
}

}  // namespace demandsig
