#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "chainforge/rational.hpp"

namespace chainforge {

/// Dense bit-packed vector over GF(2).
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

  std::size_t size() const { return bits_; }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }
  void xor_with(const BitVector& other);
  /// Lowest set index at or after `from`, or size() when none.
  std::size_t lowest(std::size_t from = 0) const;
  bool any() const;
  std::size_t count() const;
  std::vector<std::size_t> ones() const;

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Incremental column-space basis over GF(2). Columns are reduced by lowest
/// set row; when combinations are tracked, solve() returns which added
/// columns sum to a target.
class Gf2Eliminator {
 public:
  Gf2Eliminator(std::size_t rows, bool track_combinations, std::size_t max_columns = 0);

  /// Adds a column; returns true when it enlarged the span.
  bool add_column(BitVector column);
  std::size_t rank() const { return basis_.size(); }
  std::size_t columns_added() const { return added_; }

  bool in_span(BitVector target) const;
  /// Ids (insertion order) of columns summing to target; requires tracking.
  std::optional<std::vector<std::size_t>> solve(BitVector target) const;

 private:
  std::size_t rows_;
  bool track_;
  std::size_t max_columns_;
  std::size_t added_ = 0;
  std::vector<BitVector> basis_;
  std::vector<BitVector> combos_;
  std::vector<std::int64_t> pivot_of_row_;
};

/// Dense linear system A x = b over Z_p (p prime), A given column-wise as
/// sparse (row, value) lists.
struct ModPSystem {
  int p = 2;
  std::size_t rows = 0;
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> columns;
  std::vector<std::int64_t> rhs;
};

struct MinWeightResult {
  std::vector<std::int64_t> solution;  // symmetric residues per column
  Rational weight;
  bool proven_optimal = true;
  std::size_t nodes = 0;
};

/// Particular solution of A x = b mod p (free variables zero), or nullopt.
std::optional<std::vector<std::int64_t>> solve_mod_p(const ModPSystem& system);

/// Minimizes sum_j w_j |x_j| (x_j as symmetric residues) over all solutions,
/// by depth-first branch-and-bound over the free variables of the reduced
/// echelon form. `incumbent` (a known solution) seeds the bound. Stops after
/// `node_limit` nodes with proven_optimal = false.
std::optional<MinWeightResult> min_weight_solution_mod_p(
    const ModPSystem& system, const std::vector<Rational>& weights,
    const std::optional<std::vector<std::int64_t>>& incumbent = std::nullopt,
    std::size_t node_limit = 50'000'000);

bool is_prime(int p);

}  // namespace chainforge
