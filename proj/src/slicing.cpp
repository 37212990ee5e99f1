#include "chainforge/slicing.hpp"

#include <algorithm>

#include "chainforge/flatnorm.hpp"

namespace chainforge {

VertexFunction::VertexFunction(std::vector<Rational> values) : values_(std::move(values)) {}

Rational VertexFunction::lipschitz(const WeightedComplex& complex) const {
  if (complex.vertex_count() > values_.size())
    throw InputError("vertex function has " + std::to_string(values_.size()) + " values for " +
                     std::to_string(complex.vertex_count()) + " vertices");
  Rational lip = 0;
  if (complex.dimension() < 1) return lip;
  for (std::size_t e = 0; e < complex.count(1); ++e) {
    const Simplex& s = complex.simplex(1, e);
    Rational len = complex.has_metric() ? complex.distance(s[0], s[1]) : complex.weight(1, e);
    Rational q = abs(values_[s[0]] - values_[s[1]]) / len;
    if (q > lip) lip = q;
  }
  return lip;
}

const Rational& VertexFunction::max_on(const Simplex& s) const {
  const Rational* best = &values_.at(s[0]);
  for (Vertex v : s)
    if (values_.at(v) > *best) best = &values_[v];
  return *best;
}

Chain restrict_sublevel(const Chain& t, const VertexFunction& u, const Rational& r) {
  if (t.complex().vertex_count() > u.size()) throw InputError("vertex function does not cover the complex");
  Chain out(t.complex_ptr(), t.dim(), t.modulus());
  for (const auto& [i, c] : t.coeffs())
    if (u.max_on(t.complex().simplex(t.dim(), i)) < r) out.add_term(i, c);
  return out;
}

Chain slice(const Chain& t, const VertexFunction& u, const Rational& r) {
  if (t.dim() == 0) throw InputError("no slice in dimension 0");
  return boundary(restrict_sublevel(t, u, r)) - restrict_sublevel(boundary(t), u, r);
}

SliceSpectrum slice_spectrum(const Chain& t, const VertexFunction& u, std::optional<int> p) {
  if (t.dim() == 0) throw InputError("no slice in dimension 0");
  auto measure = [&](const Chain& c) { return p ? mass_p(c, *p) : mass(c); };
  SliceSpectrum out;
  out.p = p;
  out.lipschitz = u.lipschitz(t.complex());
  out.integral = 0;
  out.bound = out.lipschitz * measure(t);

  std::vector<Rational> critical;
  for (Vertex v : t.support_vertices()) critical.push_back(u(v));
  std::sort(critical.begin(), critical.end());
  critical.erase(std::unique(critical.begin(), critical.end()), critical.end());
  for (std::size_t i = 0; i + 1 < critical.size(); ++i) {
    // restriction is constant on (c_i, c_{i+1}]
    Chain s = slice(t, u, critical[i + 1]);
    Rational m = measure(s);
    out.integral += (critical[i + 1] - critical[i]) * m;
    out.intervals.push_back({critical[i], critical[i + 1], std::move(s), m});
  }
  return out;
}

}  // namespace chainforge
