#pragma once

#include <cstddef>
#include <vector>

#include "chainforge/rational.hpp"

namespace chainforge {

/// Symmetric distance matrix over points 0..n-1 with exact entries.
class FiniteMetricSpace {
 public:
  enum class Check { kFull, kSkipTriangle };

  FiniteMetricSpace() = default;
  /// Validates symmetry, zero diagonal, positivity off the diagonal and
  /// (unless skipped) the triangle inequality. Throws InputError.
  explicit FiniteMetricSpace(std::vector<std::vector<Rational>> rows, Check check = Check::kFull);

  std::size_t size() const { return n_; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  const Rational& diameter() const { return diameter_; }
  /// Smallest positive distance; zero for fewer than two points.
  const Rational& min_separation() const { return min_sep_; }

  FiniteMetricSpace restricted(const std::vector<std::size_t>& points) const;

 private:
  std::size_t n_ = 0;
  std::vector<Rational> d_;
  Rational diameter_ = 0;
  Rational min_sep_ = 0;
};

}  // namespace chainforge
