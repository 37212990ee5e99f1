#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chainforge/complex.hpp"
#include "chainforge/filling.hpp"
#include "chainforge/metric.hpp"
#include "chainforge/rational.hpp"

namespace chainforge {

/// Closed connected pseudo-manifold: every (n-1)-simplex lies on exactly two
/// n-simplices.
class ClosedManifoldComplex {
 public:
  /// Throws InputError listing violating faces, or when disconnected.
  explicit ClosedManifoldComplex(ComplexPtr complex);

  const ComplexPtr& complex_ptr() const { return complex_; }
  const WeightedComplex& complex() const { return *complex_; }
  int dimension() const { return complex_->dimension(); }
  /// Number of n-simplices on each (n-1)-simplex.
  const std::vector<int>& incidence() const { return incidence_; }
  /// Sum of top weights.
  Rational volume() const;
  long euler_characteristic() const;
  bool orientable() const;

 private:
  ComplexPtr complex_;
  std::vector<int> incidence_;
};

/// All top simplices with coefficient 1 mod 2; boundary checked.
Chain fundamental_class(const ClosedManifoldComplex& m);

/// Basis of H^1(M; Z_2) as edge cocycles vanishing on a spanning tree;
/// entry e holds the bitmask of basis cocycles taking value 1 on edge e.
struct CohomologyBasis {
  std::size_t rank = 0;
  std::vector<std::uint64_t> edge_signature;
};
CohomologyBasis h1_basis(const WeightedComplex& cx);

/// Z_2 homology signature of an edge chain (bit i: pairing with cocycle i).
std::uint64_t signature(const CohomologyBasis& basis, const Chain& cycle);

struct SystoleResult {
  /// Absent when H_1(M; Z_2) = 0.
  std::optional<Rational> sys;
  std::vector<Vertex> loop;  // closed vertex walk, first == last
  std::optional<Chain> witness;
  std::uint64_t witness_signature = 0;
  std::size_t h1_rank = 0;
};

/// Shortest edge cycle with nonzero Z_2 class (edge weights as lengths),
/// by Dijkstra over (vertex, signature) from every basepoint in parallel.
SystoleResult systole(const ClosedManifoldComplex& m);
SystoleResult systole_serial(const ClosedManifoldComplex& m);

struct VerifyParams {
  Rational epsilon = Rational(1, 1000);
  NetStrategy net_strategy = NetStrategy::kIndexScan;
  NeighborhoodRule rule = NeighborhoodRule::kReach;
  FillMode fillvol_mode = FillMode::kGreedy;
  std::size_t simplex_budget = kDefaultSimplexBudget;
};

struct SystoleReport {
  int n = 0;
  std::optional<Rational> sys;
  std::vector<Vertex> loop;
  Rational fillrad;
  Rational fillvol;
  std::string fillvol_method;
  Rational vol;
  Rational epsilon;
  Rational covering_radius;
  std::size_t net_size = 0;
  std::size_t ambient_simplices = 0;
  Distortion distortion;
  /// Sys <= 6 FillRad + 24 covering radius
  bool systolic_pass = false;
  /// Sys <= 6 FillRad
  bool systolic_strict = false;
  double sys_over_6fillrad = 0;
  double fillrad_over_fillvol_root = 0;
  double fillvol_root_over_vol_root = 0;
  double fillrad_over_vol_root = 0;
  std::vector<std::pair<std::string, double>> timings_ms;
};

/// Sys, FillRad, FillVol and Vol for a closed curve or surface, with the
/// filling radius computed in the Rips complex over the Kuratowski image of
/// the shortest-path vertex metric at scale = diameter.
SystoleReport verify_chain(const ClosedManifoldComplex& m, const VerifyParams& params = {});

struct LoewnerReport {
  Rational sys;
  Rational area;
  Rational sys_squared;
  double bound = 0;  // (2/sqrt 3) area
  double ratio = 0;  // sys^2 / bound
  /// within the rounding of the stored square roots
  bool pass = false;
  /// on the stored rational weights as they are
  bool strict = false;
};

/// Sys^2 <= (2/sqrt 3) Area, compared exactly as 3 Sys^4 <= 4 Area^2.
/// Throws InputError unless the input is an orientable genus-one surface.
LoewnerReport loewner_check(const ClosedManifoldComplex& m);

/// Shortest-path metric over the edges of a complex, edge weights as lengths.
FiniteMetricSpace edge_path_metric(const WeightedComplex& cx);

// Generators. Edge lengths are set directly: square tori use unit axis edges
// and rounded sqrt(2) diagonals, the others unit edges.
ComplexPtr square_torus(std::size_t k);
ComplexPtr rectangular_torus(std::size_t a, std::size_t b);
ComplexPtr hex_torus(std::size_t m);
ComplexPtr rp2_six();
ComplexPtr klein_bottle(std::size_t m, std::size_t n);
ComplexPtr tetrahedron_sphere();
/// n-gon of circumference `circumference`.
ComplexPtr polygon_circle(std::size_t n, const Rational& circumference);

/// Triangles of the generators above, for writing meshes.
std::vector<Simplex> square_torus_triangles(std::size_t a, std::size_t b);
std::vector<Simplex> hex_torus_triangles(std::size_t m);
std::vector<Simplex> rp2_six_triangles();
std::vector<Simplex> klein_bottle_triangles(std::size_t m, std::size_t n);

}  // namespace chainforge
