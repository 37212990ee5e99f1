#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chainforge/complex.hpp"
#include "chainforge/flatnorm.hpp"
#include "chainforge/rational.hpp"

namespace chainforge {

/// Ball membership of an atom (simplex): every vertex strictly inside.
/// Balls are taken in the metric of the measure's complex.
struct Ball {
  Vertex center;
  Rational radius;
  Rational mass;  // mu(B_radius(center))
};

struct BallCover {
  std::vector<Ball> balls;
  Rational F;
  Rational total;
  Rational covered;  // sum of ball masses
  bool property_a = false;
  bool property_b = false;
  bool property_c = false;
};

/// mu(B_s(y)) for the open ball of radius s.
Rational ball_mass(const MassMeasure& mu, Vertex y, const Rational& s);

/// r(y) = sup{s : mu(B_s(y)) >= F s}, or nullopt when no s qualifies.
std::optional<Rational> critical_radius(const MassMeasure& mu, Vertex y, const Rational& F);

/// Vitali-type selection over the support vertices of mu, by decreasing
/// critical radius, keeping y when d(y, y_j) >= 2 r(y) + 2 r_j for every kept
/// y_j. Properties (a), (b), (c) are checked exactly; a failure throws
/// InvariantError.
BallCover cover_balls(const MassMeasure& mu, const Rational& F = Rational(1, 2));

struct CyclePiece {
  Chain chain;
  Vertex center;
  Rational radius;  // r_i of the cover
  Rational eta;     // slice radius in (r_i, 2 r_i)
  Rational mass;
  Rational diameter;
  std::size_t round;
};

struct CycleDecomposition {
  std::vector<CyclePiece> pieces;
  Chain remainder;
  int p;
  Rational total_mass;
  /// remainder mass after each round
  std::vector<Rational> round_mass;
  std::size_t rounds = 0;
};

inline constexpr std::size_t kMaxDecompositionRounds = 64;

/// Splits a cycle mod p into pieces cut out by balls where the distance
/// slice vanishes mod p. Throws InputError when no such radius exists.
CycleDecomposition decompose_cycle(const Chain& l, int p, const Rational& F = Rational(1, 2));

struct ConeFill {
  Chain T;
  Vertex apex;
  Rational mass;    // mass_p(T)
  Rational reach;   // max distance apex -> supp L
  Rational bound;   // 2 * reach * mass_p(L)
};

/// T = sum c_s (apex * s). Cones through the apex vanish. Requires every cone
/// simplex in the complex.
ConeFill cone_fill(const Chain& l, Vertex apex, int p);

struct FillingCertificate {
  Chain L;
  Chain T;
  int p;
  Rational mass_L;
  Rational mass_T;
  /// mass_T / mass_L^((k+1)/k); 0 when L vanishes
  double mass_ratio = 0;
  /// max over supp T of the distance to supp L
  Rational radius;
  std::string method;
  bool proven_optimal = false;
};

/// Throws InvariantError unless dT = L mod p.
void verify_filling(const FillingCertificate& c);

FillingCertificate make_certificate(const Chain& l, Chain t, int p, std::string method);

/// Decomposition followed by a cone over each piece at its center.
FillingCertificate isoperimetric_fill(const Chain& l, int p);

enum class NeighborhoodRule {
  /// max(max vertex distance to supp L, diam/2)
  kReach,
  /// max vertex distance to supp L
  kVertex,
};

struct FillingRadius {
  Rational radius;
  FillingCertificate witness;
  std::vector<Rational> candidates;
  std::size_t probes = 0;
  /// (radius, solvable) for every probed candidate
  std::vector<std::pair<Rational, bool>> profile;
};

/// Reach of a (k+1)-simplex relative to a vertex set.
Rational simplex_reach(const WeightedComplex& cx, int dim, std::size_t index,
                       const std::vector<Rational>& dist_to_support, NeighborhoodRule rule);

/// Smallest candidate r with a mod-2 filling inside N_r. Probes candidate
/// radii concurrently (bisection with one probe per worker).
FillingRadius filling_radius(const Chain& l, NeighborhoodRule rule = NeighborhoodRule::kReach);
/// Single sweep over the candidates with one incremental elimination.
FillingRadius filling_radius_serial(const Chain& l, NeighborhoodRule rule = NeighborhoodRule::kReach);

enum class FillMode { kExact, kGreedy };

FillingCertificate filling_volume(const Chain& l, int p, FillMode mode,
                                  std::size_t node_limit = 50'000'000);

/// max over supp S vertices of the distance to the nearest supp L vertex;
/// 0 when either chain vanishes.
Rational support_distance(const Chain& s, const Chain& l);

/// Largest distance between support vertices.
Rational support_diameter(const Chain& t);

}  // namespace chainforge
