#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "chainforge/complex.hpp"
#include "chainforge/rational.hpp"

namespace chainforge {

/// Per-simplex contributions weight(s) * |coefficient|.
class MassMeasure {
 public:
  MassMeasure(ComplexPtr complex, int dim, std::vector<std::pair<std::size_t, Rational>> atoms);

  const ComplexPtr& complex_ptr() const { return complex_; }
  int dim() const { return dim_; }
  const std::vector<std::pair<std::size_t, Rational>>& atoms() const { return atoms_; }
  bool is_zero() const { return atoms_.empty(); }

  Rational total() const;
  /// Sum over atoms whose simplex index satisfies `keep`.
  Rational restricted(const std::function<bool(std::size_t)>& keep) const;

 private:
  ComplexPtr complex_;
  int dim_;
  std::vector<std::pair<std::size_t, Rational>> atoms_;
};

Rational mass(const Chain& t);
/// Mass of the symmetric reduction. Integer chains, or chains already mod p.
Rational mass_p(const Chain& t, int p);

MassMeasure mass_measure(const Chain& t);
MassMeasure mass_measure_p(const Chain& t, int p);

enum class FlatMode { kExact, kRelaxed };

/// Chain with rational coefficients; only produced by LP relaxations.
using FractionalChain = std::map<std::size_t, Rational>;

/// Witness T = R + dS (+ pQ) for a flat-norm value.
struct FlatDecomposition {
  Rational value;
  Chain R;
  Chain S;
  std::optional<Chain> Q;
  bool relaxed = false;
  /// Relaxed mode: LP optimum coefficients. R and S hold them too when the
  /// optimum happens to be integral.
  FractionalChain relaxed_R;
  FractionalChain relaxed_S;
  bool integral = true;
  std::size_t lp_solves = 0;
  std::size_t nodes = 0;
};

/// F(T) = min M(R) + M(S) over T = R + dS on the complex of T.
FlatDecomposition flat_norm(const Chain& t, FlatMode mode = FlatMode::kExact);

/// F_p(T) = min over Q of F(T - pQ).
FlatDecomposition flat_norm_mod_p(const Chain& t, int p, FlatMode mode = FlatMode::kExact);

/// Exact re-check of an integral witness: T = R + dS + pQ and
/// value = M(R) + M(S). Throws InvariantError on failure.
void verify_decomposition(const Chain& t, const FlatDecomposition& d, std::optional<int> p);

}  // namespace chainforge
