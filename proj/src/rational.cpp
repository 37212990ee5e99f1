#include "chainforge/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace chainforge {

Rational sqrt_rounded(const Rational& q) {
  if (sgn(q) < 0) throw Error("sqrt of negative rational");
  if (sgn(q) == 0) return Rational(0);
  mpz_class num = q.get_num();
  mpz_class den = q.get_den();
  if (mpz_perfect_square_p(num.get_mpz_t()) && mpz_perfect_square_p(den.get_mpz_t())) {
    mpz_class a, b;
    mpz_sqrt(a.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(b.get_mpz_t(), den.get_mpz_t());
    Rational r(a, b);
    r.canonicalize();
    return r;
  }
  // round(sqrt(num/den) * 2^k) = round(sqrt(num * 4^k / den))
  mpz_class scaled = num << (2 * kSqrtBits);
  scaled *= 4;  // one extra bit for rounding
  mpz_class quotient = scaled / den;
  mpz_class root2;
  mpz_sqrt(root2.get_mpz_t(), quotient.get_mpz_t());
  mpz_class rounded = (root2 + 1) / 2;
  Rational r(rounded, mpz_class(1) << kSqrtBits);
  r.canonicalize();
  return r;
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto fail = [&]() -> Rational { throw InputError("not a rational number: '" + s + "'"); };
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) return fail();

  if (auto slash = s.find('/'); slash != std::string::npos) {
    mpz_class n, d;
    if (n.set_str(s.substr(0, slash), 10) != 0 || d.set_str(s.substr(slash + 1), 10) != 0) return fail();
    if (d == 0) throw InputError("zero denominator in '" + s + "'");
    Rational r(n, d);
    r.canonicalize();
    return r;
  }

  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    negative = s[i] == '-';
    ++i;
  }
  std::string digits;
  long exponent = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_dot) --exponent;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      long e = 0;
      auto tail = std::string_view(s).substr(i + 1);
      if (!tail.empty() && tail.front() == '+') tail.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), e);
      if (ec != std::errc() || ptr != tail.data() + tail.size()) return fail();
      exponent += e;
      i = s.size();
      break;
    } else {
      return fail();
    }
  }
  if (!any_digit) return fail();
  mpz_class mant(digits, 10);
  if (negative) mant = -mant;
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent < 0 ? Rational(mant, ten_pow) : Rational(mant * ten_pow, 1);
  r.canonicalize();
  return r;
}

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw InputError("non-finite number");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("cannot format double");
  return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

std::string to_exact_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

Rational abs(const Rational& q) { return sgn(q) < 0 ? Rational(-q) : q; }

double root(const Rational& q, unsigned n) {
  double v = q.get_d();
  if (n == 1) return v;
  if (n == 2) return std::sqrt(v);
  return std::pow(v, 1.0 / static_cast<double>(n));
}

std::int64_t floor_to_int(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  if (!f.fits_slong_p()) throw Error("integer overflow in floor");
  return f.get_si();
}

std::int64_t ceil_to_int(const Rational& q) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  if (!c.fits_slong_p()) throw Error("integer overflow in ceil");
  return c.get_si();
}

}  // namespace chainforge
