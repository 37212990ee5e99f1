#include "chainforge/lp.hpp"

#include <limits>

namespace chainforge::lp {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_(rows, std::vector<Rational>(cols + 1)), basis_(rows), obj_(cols + 1) {}

  std::vector<Rational>& row(std::size_t i) { return a_[i]; }
  std::size_t& basic(std::size_t i) { return basis_[i]; }

  void set_objective(const std::vector<Rational>& cost) {
    for (std::size_t j = 0; j <= n_; ++j) obj_[j] = 0;
    for (std::size_t j = 0; j < n_; ++j) obj_[j] = cost[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const Rational& cb = cost[basis_[i]];
      if (sgn(cb) == 0) continue;
      for (std::size_t j = 0; j <= n_; ++j) obj_[j] -= cb * a_[i][j];
    }
  }

  // Current objective value is -obj_[n_].
  Rational value() const { return -obj_[n_]; }

  /// Runs simplex iterations; columns with allowed[j] == false never enter.
  /// Returns false when unbounded.
  bool optimize(const std::vector<char>& allowed, std::size_t& pivots) {
    while (true) {
      std::size_t enter = n_;
      for (std::size_t j = 0; j < n_; ++j)
        if (allowed[j] && sgn(obj_[j]) < 0) {
          enter = j;
          break;
        }
      if (enter == n_) return true;
      std::size_t leave = m_;
      Rational best_ratio;
      for (std::size_t i = 0; i < m_; ++i) {
        if (sgn(a_[i][enter]) <= 0) continue;
        Rational ratio = a_[i][n_] / a_[i][enter];
        if (leave == m_ || ratio < best_ratio ||
            (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
      ++pivots;
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    Rational inv = 1 / a_[r][c];
    for (auto& v : a_[r]) v *= inv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || sgn(a_[i][c]) == 0) continue;
      Rational f = a_[i][c];
      for (std::size_t j = 0; j <= n_; ++j)
        if (sgn(a_[r][j]) != 0) a_[i][j] -= f * a_[r][j];
    }
    if (sgn(obj_[c]) != 0) {
      Rational f = obj_[c];
      for (std::size_t j = 0; j <= n_; ++j)
        if (sgn(a_[r][j]) != 0) obj_[j] -= f * a_[r][j];
    }
    basis_[r] = c;
  }

  std::size_t rows() const { return m_; }
  const Rational& at(std::size_t i, std::size_t j) const { return a_[i][j]; }
  const Rational& rhs(std::size_t i) const { return a_[i][n_]; }

 private:
  std::size_t m_, n_;
  std::vector<std::vector<Rational>> a_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> obj_;
};

}  // namespace

Solution solve(const Problem& problem) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.rows.size();
  if (problem.objective.size() != n) throw Error("LP objective size mismatch");

  // column layout: structural | slack/surplus | artificial
  std::size_t n_slack = 0;
  for (const auto& r : problem.rows)
    if (r.sense != Sense::kEqual) ++n_slack;
  const std::size_t art0 = n + n_slack;
  const std::size_t total = art0 + m;

  Tableau t(m, total);
  std::size_t slack = n;
  for (std::size_t i = 0; i < m; ++i) {
    const Row& r = problem.rows[i];
    const bool flip = sgn(r.rhs) < 0;
    auto& row = t.row(i);
    for (const auto& [j, v] : r.terms) {
      if (j >= n) throw Error("LP term index out of range");
      row[j] += flip ? Rational(-v) : v;
    }
    row[total] = flip ? Rational(-r.rhs) : r.rhs;
    if (r.sense != Sense::kEqual) {
      Rational s = r.sense == Sense::kLessEqual ? 1 : -1;
      row[slack++] = flip ? Rational(-s) : s;
    }
    row[art0 + i] = 1;
    t.basic(i) = art0 + i;
  }

  Solution out;
  std::vector<Rational> phase1(total, 0);
  for (std::size_t i = 0; i < m; ++i) phase1[art0 + i] = 1;
  t.set_objective(phase1);
  std::vector<char> allowed(total, 1);
  t.optimize(allowed, out.pivots);
  if (sgn(t.value()) != 0) {
    out.status = Status::kInfeasible;
    return out;
  }
  // drive remaining artificials out of the basis where possible
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basic(i) < art0) continue;
    for (std::size_t j = 0; j < art0; ++j)
      if (sgn(t.at(i, j)) != 0) {
        t.pivot(i, j);
        ++out.pivots;
        break;
      }
  }
  for (std::size_t j = art0; j < total; ++j) allowed[j] = 0;

  std::vector<Rational> cost(total, 0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = problem.objective[j];
  t.set_objective(cost);
  if (!t.optimize(allowed, out.pivots)) {
    out.status = Status::kUnbounded;
    return out;
  }
  out.status = Status::kOptimal;
  out.value = t.value();
  out.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < m; ++i)
    if (t.basic(i) < n) out.x[t.basic(i)] = t.rhs(i);
  return out;
}

}  // namespace chainforge::lp
