#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "chainforge/complex.hpp"
#include "chainforge/flatnorm.hpp"
#include "chainforge/metric.hpp"

namespace testing_support {

using namespace chainforge;
using Rng = std::mt19937_64;

// canonical a/b; the two-argument constructor does not reduce
inline Rational ratio(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

inline long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

// random points with small integer coordinates, random tops closed downward;
// retries until every dimension has at most `per_dim` simplices
inline ComplexPtr random_complex(Rng& rng, std::size_t n, int top_dim, std::size_t tops, std::size_t per_dim = 12) {
  for (;;) {
    std::vector<std::vector<Rational>> coords(n, std::vector<Rational>(3));
    std::set<std::vector<long>> seen;
    for (auto& c : coords) {
      std::vector<long> v;
      do {
        v = {uniform(rng, 0, 6), uniform(rng, 0, 6), uniform(rng, 0, 6)};
      } while (!seen.insert(v).second);
      for (int i = 0; i < 3; ++i) c[i] = v[i];
    }
    std::set<Simplex> picked;
    while (picked.size() < tops) {
      std::vector<Vertex> all(n);
      for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<Vertex>(i);
      std::shuffle(all.begin(), all.end(), rng);
      Simplex s(all.begin(), all.begin() + top_dim + 1);
      std::sort(s.begin(), s.end());
      picked.insert(s);
    }
    Geometry g;
    g.coords = coords;
    auto cx = WeightedComplex::build(n, {picked.begin(), picked.end()}, g);
    bool ok = true;
    for (int d = 0; d <= cx->dimension(); ++d) ok = ok && cx->count(d) <= per_dim;
    if (ok) return cx;
  }
}

inline Chain random_chain(Rng& rng, const ComplexPtr& cx, int dim, long coeff, std::size_t max_terms) {
  Chain c(cx, dim);
  const std::size_t m = cx->count(dim);
  const std::size_t terms = static_cast<std::size_t>(uniform(rng, 1, static_cast<long>(std::min(m, max_terms))));
  for (std::size_t t = 0; t < terms; ++t) {
    long v = 0;
    while (v == 0) v = uniform(rng, -coeff, coeff);
    c.add_term(static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(m) - 1)), v);
  }
  return c;
}

inline std::int64_t residue_abs(std::int64_t c, std::int64_t p) {
  std::int64_t r = ((c % p) + p) % p;
  return std::min(r, p - r);
}

// iterates all vectors in the box [-bound_i, bound_i]
template <class Visit>
void odometer(const std::vector<long>& bound, Visit visit) {
  std::vector<long> x(bound.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = -bound[i];
  for (;;) {
    visit(x);
    std::size_t i = 0;
    while (i < x.size() && x[i] == bound[i]) {
      x[i] = -bound[i];
      ++i;
    }
    if (i == x.size()) return;
    ++x[i];
  }
}

inline double box_size(const std::vector<long>& bound) {
  double s = 1;
  for (long b : bound) s *= static_cast<double>(2 * b + 1);
  return s;
}

// inf over integer Q in the coefficient box of mass(T - pQ)
inline Rational brute_mass_p(const Chain& t, int p) {
  std::vector<std::pair<std::size_t, std::int64_t>> terms(t.coeffs().begin(), t.coeffs().end());
  std::int64_t top = 0;
  for (const auto& [i, c] : terms) top = std::max<std::int64_t>(top, c < 0 ? -c : c);
  const long b = static_cast<long>(top / p + 1);
  std::optional<Rational> best;
  odometer(std::vector<long>(terms.size(), b), [&](const std::vector<long>& q) {
    Rational m = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      std::int64_t r = terms[i].second - p * q[i];
      m += t.complex().weight(t.dim(), terms[i].first) * Rational(r < 0 ? -r : r);
    }
    if (!best || m < *best) best = m;
  });
  return best.value_or(Rational(0));
}

// min over integer S of M(T - dS) + M(S), or with mass_p on the first term.
// Box from M(S) <= F(T) <= M(T). Returns nullopt when the box is too big.
inline std::optional<Rational> brute_flat(const Chain& t, std::optional<int> p, double max_box = 3e5) {
  const WeightedComplex& cx = t.complex();
  const int k = t.dim();
  std::vector<std::int64_t> base(cx.count(k), 0);
  for (const auto& [i, c] : t.coeffs()) base[i] = c;
  Rational mt = 0;
  for (std::size_t i = 0; i < base.size(); ++i)
    mt += cx.weight(k, i) * Rational(p ? residue_abs(base[i], *p) : (base[i] < 0 ? -base[i] : base[i]));
  const std::size_t m = k + 1 <= cx.dimension() ? cx.count(k + 1) : 0;
  std::vector<long> bound(m);
  for (std::size_t s = 0; s < m; ++s) {
    Rational q = mt / cx.weight(k + 1, s);
    bound[s] = static_cast<long>(mpz_class(q.get_num() / q.get_den()).get_si());
  }
  if (box_size(bound) > max_box) return std::nullopt;
  Rational best = mt;
  std::vector<std::int64_t> r(base.size());
  odometer(bound, [&](const std::vector<long>& s) {
    r = base;
    Rational value = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (s[j] == 0) continue;
      value += cx.weight(k + 1, j) * Rational(s[j] < 0 ? -s[j] : s[j]);
      auto f = cx.faces(k + 1, j);
      for (std::size_t a = 0; a < f.size(); ++a) r[f[a]] -= (a % 2 == 0 ? s[j] : -s[j]);
    }
    if (value >= best) return;
    for (std::size_t i = 0; i < r.size(); ++i)
      value += cx.weight(k, i) * Rational(p ? residue_abs(r[i], *p) : (r[i] < 0 ? -r[i] : r[i]));
    if (value < best) best = value;
  });
  return best;
}

// metric of n equally spaced points on a circle of circumference n
inline FiniteMetricSpace circle_metric(std::size_t n) {
  std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t k = i > j ? i - j : j - i;
      d[i][j] = Rational(static_cast<long>(std::min(k, n - k)));
    }
  return FiniteMetricSpace(d);
}

// the closed edge loop 0-1-...-(n-1)-0 as a chain on cx
inline Chain loop_chain(const ComplexPtr& cx, std::size_t n, std::optional<int> p = std::nullopt) {
  Chain l(cx, 1, p);
  for (std::size_t i = 0; i < n; ++i) {
    Vertex a = static_cast<Vertex>(i), b = static_cast<Vertex>((i + 1) % n);
    l.add_term(cx->index_of(a < b ? Simplex{a, b} : Simplex{b, a}), a < b ? 1 : -1);
  }
  return l;
}

}  // namespace testing_support
