#pragma once

#include <cstdint>
#include <vector>

#include "chainforge/complex.hpp"
#include "chainforge/rational.hpp"

namespace chainforge {

struct EkelandOptions {
  Rational epsilon = Rational(1, 2);
  std::size_t restarts = 1;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 1'000'000;
};

struct QuasiMinimizer {
  Chain L;
  Chain S;
  int p;
  Rational epsilon;
  Rational seed_mass;
  /// mass_p(S) after each accepted move, starting with the seed
  std::vector<Rational> trace;
  std::size_t restart = 0;
  std::size_t moves_checked = 0;
  /// every single generator move g satisfies
  /// mass_p(S + g) + epsilon mass_p(g) >= mass_p(S)
  bool certified = false;
};

/// Penalized local search over fillings of L: moves c * d(tau) for
/// (k+2)-simplices tau and residues c, accepted when
/// mass_p(S + g) + epsilon mass_p(g) < mass_p(S). Restart 0 is steepest
/// descent; further restarts take first improvements in a seeded random
/// order and run concurrently. The lightest result wins.
QuasiMinimizer quasi_minimize(const Chain& l, const Chain& seed, int p, const EkelandOptions& options = {});
QuasiMinimizer quasi_minimize_serial(const Chain& l, const Chain& seed, int p,
                                     const EkelandOptions& options = {});

/// Re-checks feasibility and the local certificate. Throws InvariantError.
void verify_quasi_minimizer(const QuasiMinimizer& q);

struct DensityRow {
  Vertex x;
  Rational rho;
  Rational mass;  // mass_p of simplices of S touching B_rho(x)
  double model = 0;
  double monotone_quantity = 0;
};

struct DensityProfile {
  std::vector<DensityRow> rows;
  /// smallest delta with model <= measured on every row
  double delta = 0;
  bool nondecreasing = true;
  bool monotone_quantity_nondecreasing = true;
};

/// Radii strictly between 0 and dist(x, supp L): the distinct vertex
/// distances from x below that bound, shifted just past each.
std::vector<Rational> default_radii(const Chain& s, const Chain& l, Vertex x);

/// Mass of S in balls around test vertices x (x in supp S, off supp L,
/// radii below dist(x, supp L)).
DensityProfile density_profile(const QuasiMinimizer& q, const std::vector<Vertex>& xs,
                               const std::vector<std::vector<Rational>>& radii);

}  // namespace chainforge
