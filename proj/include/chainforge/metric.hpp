#pragma once

#include <cstddef>
#include <vector>

#include "chainforge/complex.hpp"
#include "chainforge/metric_space.hpp"
#include "chainforge/rational.hpp"

namespace chainforge {

enum class NetStrategy {
  /// Scan points in index order, keep a point when it is at least epsilon
  /// from every kept point.
  kIndexScan,
  /// Farthest-point sampling seeded at point 0; stops once the farthest
  /// remaining point is closer than epsilon.
  kFarthestPoint,
};

/// Maximal epsilon-separated subset: pairwise distances >= epsilon and every
/// point within < epsilon of the net. Deterministic.
std::vector<std::size_t> maximal_epsilon_net(const FiniteMetricSpace& space, const Rational& epsilon,
                                             NetStrategy strategy = NetStrategy::kIndexScan);

/// Largest distance from a point to its nearest net point.
Rational covering_radius(const FiniteMetricSpace& space, const std::vector<std::size_t>& net);

/// x -> (d(x, q))_{q in net} with the sup norm.
class Embedding {
 public:
  Embedding(const FiniteMetricSpace& source, std::vector<std::size_t> net);

  const std::vector<std::size_t>& net() const { return net_; }
  std::size_t size() const { return coords_.size(); }
  const std::vector<Rational>& coords(std::size_t x) const { return coords_[x]; }
  /// Sup-norm distance between images.
  Rational image_distance(std::size_t x, std::size_t y) const;
  /// Image distances as a metric space. Throws InputError if two points
  /// collapse to the same image.
  FiniteMetricSpace image_metric() const;

 private:
  std::vector<std::size_t> net_;
  std::vector<std::vector<Rational>> coords_;
};

Embedding kuratowski_embed(const FiniteMetricSpace& space, std::vector<std::size_t> net);

struct Distortion {
  Rational expansion;    // max image/source ratio, never above 1
  Rational contraction;  // min image/source ratio
};

Distortion distortion(const FiniteMetricSpace& source, const Embedding& e);

inline constexpr std::size_t kDefaultSimplexBudget = 2'000'000;

/// Vietoris-Rips complex: every vertex set of size <= max_dim+1 with pairwise
/// distances <= scale. Weights from the metric (Cayley-Menger with fallback).
/// Throws InputError when the simplex count exceeds `budget`.
ComplexPtr build_rips(const FiniteMetricSpace& space, const Rational& scale, int max_dim,
                      std::size_t budget = kDefaultSimplexBudget);
ComplexPtr build_rips(const Embedding& e, const Rational& scale, int max_dim,
                      std::size_t budget = kDefaultSimplexBudget);

/// Single-threaded reference for build_rips.
ComplexPtr build_rips_serial(const FiniteMetricSpace& space, const Rational& scale, int max_dim,
                             std::size_t budget = kDefaultSimplexBudget);

/// Shortest-path metric of a weighted graph on n vertices (edge lengths > 0).
/// Throws InputError when the graph is disconnected.
FiniteMetricSpace shortest_path_metric(std::size_t n,
                                       const std::vector<std::pair<std::pair<std::size_t, std::size_t>, Rational>>& edges);

}  // namespace chainforge
