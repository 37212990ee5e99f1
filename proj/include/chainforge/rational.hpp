#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chainforge {

/// Exact rational scalar used for weights, distances and masses.
using Rational = mpq_class;

/// Base error for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input (files, flags, preconditions).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computed certificate failed its exact re-verification.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Irrational quantities (square roots) are rounded to the nearest multiple of
// 2^-kSqrtBits. Perfect squares are returned exactly.
inline constexpr unsigned kSqrtBits = 40;

Rational sqrt_rounded(const Rational& q);

/// Parses "3", "-2/7", "0.125", "1e-3" exactly.
Rational parse_rational(std::string_view text);

/// Exact rational from a binary double via its shortest round-trip decimal.
Rational rational_from_double(double x);

/// "p/q" or "p" when the denominator is one.
std::string to_exact_string(const Rational& q);

double to_double(const Rational& q);

Rational abs(const Rational& q);

/// n-th root rounded to double; only used for reporting.
double root(const Rational& q, unsigned n);

std::int64_t floor_to_int(const Rational& q);
std::int64_t ceil_to_int(const Rational& q);

}  // namespace chainforge
