#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "chainforge/rational.hpp"

namespace chainforge::lp {

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Row {
  std::vector<std::pair<std::size_t, Rational>> terms;
  Sense sense = Sense::kEqual;
  Rational rhs;
};

/// minimize objective . x  subject to rows, x >= 0.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<Rational> objective;
  std::vector<Row> rows;
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Solution {
  Status status = Status::kInfeasible;
  Rational value;
  std::vector<Rational> x;
  std::size_t pivots = 0;
};

/// Dense two-phase primal simplex on exact rationals with Bland's rule.
Solution solve(const Problem& problem);

}  // namespace chainforge::lp
