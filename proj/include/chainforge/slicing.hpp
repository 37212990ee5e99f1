#pragma once

#include <vector>

#include "chainforge/complex.hpp"
#include "chainforge/rational.hpp"

namespace chainforge {

/// Real-valued function on the vertices of a complex.
class VertexFunction {
 public:
  explicit VertexFunction(std::vector<Rational> values);

  std::size_t size() const { return values_.size(); }
  const Rational& operator()(Vertex v) const { return values_.at(v); }
  const std::vector<Rational>& values() const { return values_; }

  /// max over edges |u(a) - u(b)| / d(a, b); d is the metric when the
  /// complex has one, otherwise the edge weight.
  Rational lipschitz(const WeightedComplex& complex) const;
  /// Largest value over the vertices of a simplex.
  const Rational& max_on(const Simplex& s) const;

 private:
  std::vector<Rational> values_;
};

/// T restricted to {u < r}: simplices whose vertices all have u < r.
Chain restrict_sublevel(const Chain& t, const VertexFunction& u, const Rational& r);

/// <T,u,r> = d(T|{u<r}) - (dT)|{u<r}.
Chain slice(const Chain& t, const VertexFunction& u, const Rational& r);

struct SliceInterval {
  Rational lo;  // open end
  Rational hi;  // closed end
  Chain slice;
  Rational mass;
};

struct SliceSpectrum {
  std::vector<SliceInterval> intervals;
  Rational lipschitz;
  /// sum over intervals of length * mass(slice)
  Rational integral;
  /// lipschitz * mass(T)
  Rational bound;
  std::optional<int> p;
};

/// Slices on every interval (c_i, c_{i+1}] between consecutive critical
/// values of u on the support vertices of T. Masses are mass_p when p is set.
SliceSpectrum slice_spectrum(const Chain& t, const VertexFunction& u, std::optional<int> p = std::nullopt);

}  // namespace chainforge
