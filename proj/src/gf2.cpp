#include "chainforge/gf2.hpp"

#include <algorithm>
#include <bit>
#include <functional>

namespace chainforge {

void BitVector::xor_with(const BitVector& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
}

std::size_t BitVector::lowest(std::size_t from) const {
  if (from >= bits_) return bits_;
  std::size_t w = from >> 6;
  std::uint64_t word = words_[w] & (~std::uint64_t{0} << (from & 63));
  while (true) {
    if (word) {
      std::size_t idx = (w << 6) + static_cast<std::size_t>(std::countr_zero(word));
      return idx < bits_ ? idx : bits_;
    }
    if (++w == words_.size()) return bits_;
    word = words_[w];
  }
}

bool BitVector::any() const {
  for (auto w : words_)
    if (w) return true;
  return false;
}

std::size_t BitVector::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::size_t> BitVector::ones() const {
  std::vector<std::size_t> out;
  for (std::size_t i = lowest(); i < bits_; i = lowest(i + 1)) out.push_back(i);
  return out;
}

Gf2Eliminator::Gf2Eliminator(std::size_t rows, bool track_combinations, std::size_t max_columns)
    : rows_(rows), track_(track_combinations), max_columns_(max_columns), pivot_of_row_(rows, -1) {}

bool Gf2Eliminator::add_column(BitVector column) {
  if (column.size() != rows_) throw Error("column size mismatch");
  const std::size_t id = added_++;
  BitVector combo;
  if (track_) {
    if (id >= max_columns_) throw Error("column budget exceeded in tracked elimination");
    combo = BitVector(max_columns_);
    combo.set(id);
  }
  std::size_t low = column.lowest();
  while (low < rows_) {
    std::int64_t b = pivot_of_row_[low];
    if (b < 0) break;
    column.xor_with(basis_[static_cast<std::size_t>(b)]);
    if (track_) combo.xor_with(combos_[static_cast<std::size_t>(b)]);
    low = column.lowest(low + 1);
  }
  if (low >= rows_) return false;
  pivot_of_row_[low] = static_cast<std::int64_t>(basis_.size());
  basis_.push_back(std::move(column));
  if (track_) combos_.push_back(std::move(combo));
  return true;
}

bool Gf2Eliminator::in_span(BitVector target) const {
  std::size_t low = target.lowest();
  while (low < rows_) {
    std::int64_t b = pivot_of_row_[low];
    if (b < 0) return false;
    target.xor_with(basis_[static_cast<std::size_t>(b)]);
    low = target.lowest(low + 1);
  }
  return true;
}

std::optional<std::vector<std::size_t>> Gf2Eliminator::solve(BitVector target) const {
  if (!track_) throw Error("solve() needs combination tracking");
  BitVector combo(max_columns_);
  std::size_t low = target.lowest();
  while (low < rows_) {
    std::int64_t b = pivot_of_row_[low];
    if (b < 0) return std::nullopt;
    target.xor_with(basis_[static_cast<std::size_t>(b)]);
    combo.xor_with(combos_[static_cast<std::size_t>(b)]);
    low = target.lowest(low + 1);
  }
  return combo.ones();
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

namespace {

std::int64_t mod(std::int64_t a, int p) {
  std::int64_t r = a % p;
  return r < 0 ? r + p : r;
}

std::int64_t inverse(std::int64_t a, int p) {
  // Fermat; p is prime and small
  std::int64_t result = 1, base = mod(a, p), e = p - 2;
  while (e > 0) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return result;
}

std::int64_t sym(std::int64_t v, int p) {
  std::int64_t r = mod(v, p);
  return 2 * r > p ? r - p : r;
}

struct Echelon {
  int p;
  std::size_t cols;
  std::vector<std::vector<std::int64_t>> rows;  // reduced rows, rhs at index cols
  std::vector<std::size_t> pivot_col;           // per reduced row
  bool consistent = true;
};

Echelon reduce(const ModPSystem& s) {
  if (!is_prime(s.p)) throw InputError("exact mod-p solving needs a prime modulus");
  Echelon e{s.p, s.columns.size(), {}, {}, true};
  std::vector<std::vector<std::int64_t>> m(s.rows, std::vector<std::int64_t>(e.cols + 1, 0));
  for (std::size_t c = 0; c < e.cols; ++c)
    for (const auto& [r, v] : s.columns[c]) m[r][c] = mod(m[r][c] + v, s.p);
  for (std::size_t r = 0; r < s.rows; ++r) m[r][e.cols] = mod(s.rhs[r], s.p);

  std::size_t lead = 0;
  for (std::size_t c = 0; c < e.cols && lead < s.rows; ++c) {
    std::size_t piv = lead;
    while (piv < s.rows && m[piv][c] == 0) ++piv;
    if (piv == s.rows) continue;
    std::swap(m[piv], m[lead]);
    std::int64_t inv = inverse(m[lead][c], s.p);
    for (auto& v : m[lead]) v = v * inv % s.p;
    for (std::size_t r = 0; r < s.rows; ++r) {
      if (r == lead || m[r][c] == 0) continue;
      std::int64_t f = m[r][c];
      for (std::size_t t = c; t <= e.cols; ++t) m[r][t] = mod(m[r][t] - f * m[lead][t], s.p);
    }
    e.pivot_col.push_back(c);
    ++lead;
  }
  for (std::size_t r = lead; r < s.rows; ++r)
    if (m[r][e.cols] != 0) e.consistent = false;
  m.resize(lead);
  e.rows = std::move(m);
  return e;
}

}  // namespace

std::optional<std::vector<std::int64_t>> solve_mod_p(const ModPSystem& system) {
  Echelon e = reduce(system);
  if (!e.consistent) return std::nullopt;
  std::vector<std::int64_t> x(e.cols, 0);
  for (std::size_t r = 0; r < e.rows.size(); ++r) x[e.pivot_col[r]] = sym(e.rows[r][e.cols], e.p);
  return x;
}

std::optional<MinWeightResult> min_weight_solution_mod_p(
    const ModPSystem& system, const std::vector<Rational>& weights,
    const std::optional<std::vector<std::int64_t>>& incumbent, std::size_t node_limit) {
  if (weights.size() != system.columns.size()) throw Error("weight count mismatch");
  Echelon e = reduce(system);
  if (!e.consistent) return std::nullopt;
  const int p = e.p;
  const std::size_t nrows = e.rows.size();

  std::vector<char> is_pivot(e.cols, 0);
  for (std::size_t c : e.pivot_col) is_pivot[c] = 1;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < e.cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  // heavier free variables first: their cost enters the bound early
  std::stable_sort(free_cols.begin(), free_cols.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  const std::size_t nfree = free_cols.size();

  // rows fully determined once the free variables up to this depth are fixed
  std::vector<std::vector<std::size_t>> settled_at(nfree + 1);
  for (std::size_t r = 0; r < nrows; ++r) {
    std::size_t last = 0;
    for (std::size_t t = 0; t < nfree; ++t)
      if (e.rows[r][free_cols[t]] != 0) last = t + 1;
    settled_at[last].push_back(r);
  }

  auto cost = [&](std::size_t col, std::int64_t v) -> Rational {
    std::int64_t s = sym(v, p);
    return weights[col] * Rational(s < 0 ? -s : s);
  };

  MinWeightResult best;
  bool have_best = false;
  if (incumbent) {
    if (incumbent->size() != e.cols) throw Error("incumbent size mismatch");
    // verify before trusting it as a bound
    std::vector<std::int64_t> lhs(system.rows, 0);
    for (std::size_t c = 0; c < e.cols; ++c)
      for (const auto& [r, v] : system.columns[c]) lhs[r] = mod(lhs[r] + v * (*incumbent)[c], p);
    bool ok = true;
    for (std::size_t r = 0; r < system.rows; ++r)
      if (lhs[r] != mod(system.rhs[r], p)) ok = false;
    if (ok) {
      best.solution.resize(e.cols);
      best.weight = 0;
      for (std::size_t c = 0; c < e.cols; ++c) {
        best.solution[c] = sym((*incumbent)[c], p);
        best.weight += cost(c, best.solution[c]);
      }
      have_best = true;
    }
  }

  std::vector<std::int64_t> value(e.cols, 0);
  std::size_t nodes = 0;
  bool truncated = false;

  std::function<void(std::size_t, Rational)> dfs = [&](std::size_t depth, Rational bound) {
    if (truncated) return;
    if (++nodes > node_limit) {
      truncated = true;
      return;
    }
    for (std::size_t r : settled_at[depth]) {
      std::int64_t v = e.rows[r][e.cols];
      for (std::size_t t = 0; t < depth; ++t) v -= e.rows[r][free_cols[t]] * value[free_cols[t]];
      v = mod(v, p);
      value[e.pivot_col[r]] = v;
      bound += cost(e.pivot_col[r], v);
    }
    if (have_best && bound >= best.weight) return;
    if (depth == nfree) {
      best.solution.assign(e.cols, 0);
      for (std::size_t c = 0; c < e.cols; ++c) best.solution[c] = sym(value[c], p);
      best.weight = bound;
      have_best = true;
      return;
    }
    const std::size_t col = free_cols[depth];
    // try residues in order of increasing |value|
    std::vector<std::int64_t> order;
    order.push_back(0);
    for (std::int64_t a = 1; 2 * a <= p; ++a) {
      order.push_back(a);
      if (2 * a != p) order.push_back(p - a);
    }
    for (std::int64_t v : order) {
      value[col] = v;
      dfs(depth + 1, bound + cost(col, v));
      if (truncated) break;
    }
    value[col] = 0;
  };
  dfs(0, Rational(0));
  if (!have_best) return std::nullopt;
  best.proven_optimal = !truncated;
  best.nodes = nodes;
  return best;
}

}  // namespace chainforge
