#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

namespace demandsig {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <class T>
inline constexpr bool is_exact_v = std::same_as<T, Rational>;

template <Scalar T>
T abs_of(const T& v) {
  return v < T(0) ? T(-v) : v;
}

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }

// Tolerance collapses to zero for exact arithmetic.
template <Scalar T>
T tolerance(double tol) {
  if constexpr (is_exact_v<T>) {
    return T(0);
  } else {
    return tol;
  }
}

template <Scalar T>
T ratio(std::int64_t num, std::int64_t den) {
  return T(num) / T(den);
}

template <Scalar To, Scalar From>
To scalar_cast(const From& v) {
  if constexpr (std::same_as<To, From>) {
    return v;
  } else if constexpr (std::same_as<To, double>) {
    return to_double(v);
  } else {
    return Rational(v);
  }
}

// Accepts integers, "p/q", and decimals with optional exponent; exact.
Rational parse_rational(std::string_view text);

template <Scalar T>
T parse_scalar(std::string_view text) {
  if constexpr (is_exact_v<T>) {
    return parse_rational(text);
  } else {
    return to_double(parse_rational(text));
  }
}

std::string to_string(const Rational& v);
std::string to_string(double v);

// Best rational approximation with bounded denominator (continued fractions).
Rational approximate_rational(double v, std::int64_t max_denominator, double tol);

struct Tolerances {
  double feasibility = 1e-9;
  double optimality = 1e-9;
  double wardrop = 1e-8;
  double active = 1e-7;
  double load = 1e-10;
  double width_floor = 1e-8;
  double breakpoint_dedup = 1e-9;
};

}  // namespace demandsig
