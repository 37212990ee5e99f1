#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chainforge/metric_space.hpp"
#include "chainforge/rational.hpp"

namespace chainforge {

using Vertex = std::uint32_t;
/// Strictly increasing vertex tuple; the canonical orientation.
using Simplex = std::vector<Vertex>;

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept;
};

/// Sorts a vertex tuple into canonical order. Returns the permutation sign,
/// or 0 when the tuple repeats a vertex (degenerate simplex).
int canonicalize(Simplex& s);

/// "[0,3,5]"
std::string to_string(const Simplex& s);

/// Geometry attached to a complex. Coordinates take precedence for weights
/// (exact squared distances); the metric takes precedence for distances.
struct Geometry {
  std::vector<std::vector<Rational>> coords;
  std::shared_ptr<const FiniteMetricSpace> metric;
};

/// Squared k-volume of a simplex from its squared edge lengths
/// (Cayley-Menger determinant). `sq[i][j]` indexes the simplex's vertices.
Rational cayley_menger_squared_volume(const std::vector<std::vector<Rational>>& sq);

/// Finite simplicial complex with a positive weight (k-volume) per simplex.
/// Immutable after construction; share through shared_ptr<const>.
class WeightedComplex {
 public:
  /// Downward closure of `simplices` on vertices 0..n-1 (all vertices are
  /// included). Weights come from `geometry`; simplices of dimension >= 1
  /// require coordinates or a metric.
  static std::shared_ptr<const WeightedComplex> build(std::size_t n_vertices,
                                                      std::vector<Simplex> simplices,
                                                      Geometry geometry = {});

  /// Per-dimension simplex lists that are already canonical and downward
  /// closed (e.g. clique enumerations). Weights as in build(); the weight
  /// loop runs on OpenMP workers when `parallel` is set.
  static std::shared_ptr<const WeightedComplex> build_closed(
      std::vector<std::vector<Simplex>> by_dim, Geometry geometry, bool parallel = true);

  /// Explicit weights for every simplex of dimension >= 1 (keyed by simplex).
  /// The key set must already be downward closed.
  static std::shared_ptr<const WeightedComplex> build_weighted(
      std::size_t n_vertices, const std::vector<std::pair<Simplex, Rational>>& weighted,
      Geometry geometry = {});

  std::size_t vertex_count() const { return simplices_.empty() ? 0 : simplices_[0].size(); }
  /// Highest dimension present; -1 for the empty complex.
  int dimension() const { return static_cast<int>(simplices_.size()) - 1; }
  std::size_t count(int dim) const;
  std::size_t total_count() const;

  const std::vector<Simplex>& simplices(int dim) const;
  const Simplex& simplex(int dim, std::size_t index) const { return simplices_[dim][index]; }
  const Rational& weight(int dim, std::size_t index) const { return weights_[dim][index]; }

  std::optional<std::size_t> find(const Simplex& s) const;
  /// Like find() but throws InputError naming the missing simplex.
  std::size_t index_of(const Simplex& s) const;

  /// Indices (in dimension dim-1) of the faces of simplex `index`; face j
  /// omits vertex j and carries sign (-1)^j.
  std::span<const std::uint32_t> faces(int dim, std::size_t index) const;

  bool has_metric() const { return static_cast<bool>(metric_); }
  const FiniteMetricSpace& metric() const;
  std::shared_ptr<const FiniteMetricSpace> metric_ptr() const { return metric_; }
  const Rational& distance(Vertex a, Vertex b) const { return metric()(a, b); }
  const std::vector<std::vector<Rational>>& coords() const { return coords_; }

  /// Largest pairwise vertex distance within the simplex.
  Rational diameter(int dim, std::size_t index) const;

  /// True when every simplex of this complex is a simplex of `other`.
  bool is_subcomplex_of(const WeightedComplex& other) const;

 private:
  WeightedComplex() = default;
  void index_and_link();
  void attach_geometry(Geometry geometry, std::size_t n_vertices);
  void compute_weights(bool parallel);

  std::vector<std::vector<Simplex>> simplices_;
  std::vector<std::vector<Rational>> weights_;
  std::vector<std::unordered_map<Simplex, std::size_t, SimplexHash>> index_;
  std::vector<std::vector<std::uint32_t>> faces_;
  std::vector<std::vector<Rational>> coords_;
  std::shared_ptr<const FiniteMetricSpace> metric_;
};

using ComplexPtr = std::shared_ptr<const WeightedComplex>;

/// Integer chains (nullopt) or residues mod p.
using Modulus = std::optional<int>;

/// Symmetric residue of c modulo p in [-floor(p/2), floor(p/2)]; the even-p
/// tie resolves to +p/2.
std::int64_t symmetric_residue(std::int64_t c, int p);

/// Sparse chain of fixed dimension over a complex. Zero coefficients are never
/// stored; mod-p chains keep symmetric residues.
class Chain {
 public:
  using Coeffs = std::map<std::size_t, std::int64_t>;

  Chain(ComplexPtr complex, int dim, Modulus modulus = std::nullopt);

  /// Builds from vertex tuples in any order; orientation signs are applied.
  static Chain from_terms(ComplexPtr complex, int dim,
                          const std::vector<std::pair<Simplex, std::int64_t>>& terms,
                          Modulus modulus = std::nullopt);
  /// Sum of every dim-simplex with coefficient one.
  static Chain all_simplices(ComplexPtr complex, int dim, Modulus modulus = std::nullopt);

  int dim() const { return dim_; }
  const Modulus& modulus() const { return modulus_; }
  const Coeffs& coeffs() const { return coeffs_; }
  std::int64_t coefficient(std::size_t index) const;
  bool is_zero() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }

  const WeightedComplex& complex() const { return *complex_; }
  const ComplexPtr& complex_ptr() const { return complex_; }

  void add_term(std::size_t index, std::int64_t c);
  /// Vertices of every simplex in the support, sorted and unique.
  std::vector<Vertex> support_vertices() const;
  std::int64_t max_abs_coefficient() const;
  std::int64_t l1_norm() const;

  Chain operator-() const;
  Chain& operator+=(const Chain& other);
  Chain& operator-=(const Chain& other);
  friend Chain operator+(Chain a, const Chain& b) { return a += b; }
  friend Chain operator-(Chain a, const Chain& b) { return a -= b; }
  friend Chain operator*(std::int64_t s, const Chain& c);
  friend bool operator==(const Chain& a, const Chain& b);

  /// Same coefficients with a different modulus tag (reducing if needed).
  Chain with_modulus(Modulus m) const;

 private:
  void require_compatible(const Chain& other) const;

  ComplexPtr complex_;
  int dim_;
  Modulus modulus_;
  Coeffs coeffs_;
};

/// Alternating face sum. Throws InputError on 0-chains.
Chain boundary(const Chain& t);

/// Coefficient-wise symmetric reduction. Integer input only; p >= 2.
Chain reduce_mod_p(const Chain& t, int p);

/// True when a == b coefficient-wise modulo p (both read as integer chains).
bool congruent_mod(const Chain& a, const Chain& b, int p);

/// Vertex map inducing a simplicial map between complexes.
class SimplicialMap {
 public:
  /// Throws InputError ("map not simplicial") when some simplex image does
  /// not span a simplex of the target.
  SimplicialMap(ComplexPtr source, ComplexPtr target, std::vector<Vertex> vertex_map);

  const ComplexPtr& source() const { return source_; }
  const ComplexPtr& target() const { return target_; }
  Vertex operator()(Vertex v) const { return map_[v]; }
  /// weight(image)/weight(source) when the image is nondegenerate.
  std::optional<Rational> expansion(int dim, std::size_t index) const;
  /// Largest expansion over nondegenerate simplices of dimension dim (0 if none).
  Rational max_expansion(int dim) const;

 private:
  ComplexPtr source_;
  ComplexPtr target_;
  std::vector<Vertex> map_;
};

Chain pushforward(const SimplicialMap& f, const Chain& t);

}  // namespace chainforge
