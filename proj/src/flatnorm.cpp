#include "chainforge/flatnorm.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "chainforge/lp.hpp"

namespace chainforge {

MassMeasure::MassMeasure(ComplexPtr complex, int dim,
                         std::vector<std::pair<std::size_t, Rational>> atoms)
    : complex_(std::move(complex)), dim_(dim), atoms_(std::move(atoms)) {}

Rational MassMeasure::total() const {
  Rational t = 0;
  for (const auto& [i, m] : atoms_) t += m;
  return t;
}

Rational MassMeasure::restricted(const std::function<bool(std::size_t)>& keep) const {
  Rational t = 0;
  for (const auto& [i, m] : atoms_)
    if (keep(i)) t += m;
  return t;
}

Rational mass(const Chain& t) {
  Rational m = 0;
  for (const auto& [i, c] : t.coeffs()) m += t.complex().weight(t.dim(), i) * Rational(c < 0 ? -c : c);
  return m;
}

namespace {

Chain as_reduced(const Chain& t, int p) {
  if (p < 2) throw InputError("modulus must be at least 2");
  if (t.modulus()) {
    if (*t.modulus() != p) throw InputError("chain carries a different modulus");
    return t;
  }
  return reduce_mod_p(t, p);
}

std::int64_t sym(std::int64_t v, int p) { return symmetric_residue(v, p); }

}  // namespace

Rational mass_p(const Chain& t, int p) { return mass(as_reduced(t, p)); }

MassMeasure mass_measure(const Chain& t) {
  std::vector<std::pair<std::size_t, Rational>> atoms;
  for (const auto& [i, c] : t.coeffs())
    atoms.emplace_back(i, t.complex().weight(t.dim(), i) * Rational(c < 0 ? -c : c));
  return MassMeasure(t.complex_ptr(), t.dim(), std::move(atoms));
}

MassMeasure mass_measure_p(const Chain& t, int p) { return mass_measure(as_reduced(t, p)); }

namespace {

// LP over S (coefficients on (k+1)-simplices) with R = T - dS free in sign.
class FlatProgram {
 public:
  explicit FlatProgram(const Chain& t) : t_(t), cx_(t.complex()), k_(t.dim()) {
    const Rational total = mass(t);
    for (std::size_t f = 0; f < cx_.count(k_ + 1); ++f) {
      // any S with M(S) > M(T) loses to S = 0
      if (floor_to_int(total / cx_.weight(k_ + 1, f)) >= 1) faces_.push_back(f);
    }
    auto use_row = [&](std::size_t e) {
      if (row_of_.emplace(e, rows_.size()).second) rows_.push_back(e);
    };
    for (const auto& [e, c] : t.coeffs()) use_row(e);
    for (std::size_t f : faces_)
      for (std::uint32_t e : cx_.faces(k_ + 1, f)) use_row(e);
  }

  std::size_t face_count() const { return faces_.size(); }
  std::size_t face(std::size_t j) const { return faces_[j]; }

  lp::Solution solve(const std::vector<std::int64_t>& lo, const std::vector<std::int64_t>& hi,
                     const std::vector<char>& has_lo, const std::vector<char>& has_hi) const {
    const std::size_t E = rows_.size(), F = faces_.size();
    lp::Problem prob;
    prob.num_vars = 2 * E + 2 * F;
    prob.objective.resize(prob.num_vars);
    for (std::size_t i = 0; i < E; ++i) {
      const Rational& w = cx_.weight(k_, rows_[i]);
      prob.objective[i] = w;
      prob.objective[E + i] = w;
    }
    for (std::size_t j = 0; j < F; ++j) {
      const Rational& w = cx_.weight(k_ + 1, faces_[j]);
      prob.objective[2 * E + j] = w;
      prob.objective[2 * E + F + j] = w;
    }
    prob.rows.resize(E);
    for (std::size_t i = 0; i < E; ++i) {
      auto& row = prob.rows[i];
      row.sense = lp::Sense::kEqual;
      row.rhs = Rational(t_.coefficient(rows_[i]));
      row.terms.emplace_back(i, Rational(1));
      row.terms.emplace_back(E + i, Rational(-1));
    }
    for (std::size_t j = 0; j < F; ++j) {
      auto fc = cx_.faces(k_ + 1, faces_[j]);
      for (std::size_t t = 0; t < fc.size(); ++t) {
        std::size_t i = row_of_.at(fc[t]);
        Rational sgn_v = (t % 2 == 0) ? 1 : -1;
        prob.rows[i].terms.emplace_back(2 * E + j, sgn_v);
        prob.rows[i].terms.emplace_back(2 * E + F + j, Rational(-sgn_v));
      }
      if (has_lo[j]) {
        lp::Row r;
        r.sense = lp::Sense::kGreaterEqual;
        r.rhs = Rational(lo[j]);
        r.terms = {{2 * E + j, Rational(1)}, {2 * E + F + j, Rational(-1)}};
        prob.rows.push_back(std::move(r));
      }
      if (has_hi[j]) {
        lp::Row r;
        r.sense = lp::Sense::kLessEqual;
        r.rhs = Rational(hi[j]);
        r.terms = {{2 * E + j, Rational(1)}, {2 * E + F + j, Rational(-1)}};
        prob.rows.push_back(std::move(r));
      }
    }
    return lp::solve(prob);
  }

  std::vector<Rational> s_values(const lp::Solution& sol) const {
    const std::size_t E = rows_.size(), F = faces_.size();
    std::vector<Rational> s(F);
    for (std::size_t j = 0; j < F; ++j) s[j] = sol.x[2 * E + j] - sol.x[2 * E + F + j];
    return s;
  }

  FractionalChain r_values(const lp::Solution& sol) const {
    const std::size_t E = rows_.size();
    FractionalChain r;
    for (std::size_t i = 0; i < E; ++i) {
      Rational v = sol.x[i] - sol.x[E + i];
      if (sgn(v) != 0) r[rows_[i]] = v;
    }
    return r;
  }

  Chain s_chain(const std::vector<std::int64_t>& s) const {
    Chain out(t_.complex_ptr(), k_ + 1);
    for (std::size_t j = 0; j < faces_.size(); ++j) out.add_term(faces_[j], s[j]);
    return out;
  }

 private:
  const Chain& t_;
  const WeightedComplex& cx_;
  int k_;
  std::vector<std::size_t> faces_;
  std::vector<std::size_t> rows_;
  std::unordered_map<std::size_t, std::size_t> row_of_;
};

bool is_integer(const Rational& q) { return q.get_den() == 1; }

std::int64_t nearest(const Rational& q) { return floor_to_int(q + Rational(1, 2)); }

FlatDecomposition integer_flat_norm(const Chain& t, FlatMode mode) {
  const ComplexPtr& cx = t.complex_ptr();
  const int k = t.dim();
  FlatDecomposition out{mass(t), t, Chain(cx, k + 1), std::nullopt, mode == FlatMode::kRelaxed,
                        {}, {}, true, 0, 0};
  if (t.is_zero()) {
    out.R = Chain(cx, k);
    return out;
  }
  FlatProgram prog(t);
  const std::size_t F = prog.face_count();
  if (F == 0) {
    for (const auto& [i, c] : t.coeffs()) out.relaxed_R[i] = Rational(c);
    return out;
  }

  auto evaluate = [&](const std::vector<std::int64_t>& s) {
    Chain S = prog.s_chain(s);
    Chain R = t - boundary(S);
    Rational v = mass(R) + mass(S);
    return std::tuple<Rational, Chain, Chain>(v, std::move(R), std::move(S));
  };

  std::vector<std::int64_t> lo(F, 0), hi(F, 0);
  std::vector<char> has_lo(F, 0), has_hi(F, 0);

  if (mode == FlatMode::kRelaxed) {
    lp::Solution sol = prog.solve(lo, hi, has_lo, has_hi);
    ++out.lp_solves;
    if (sol.status != lp::Status::kOptimal) throw Error("flat-norm LP did not reach an optimum");
    out.value = sol.value;
    out.relaxed_R = prog.r_values(sol);
    auto s = prog.s_values(sol);
    out.integral = true;
    std::vector<std::int64_t> si(F, 0);
    for (std::size_t j = 0; j < F; ++j) {
      if (sgn(s[j]) != 0) out.relaxed_S[prog.face(j)] = s[j];
      if (!is_integer(s[j])) out.integral = false;
      else si[j] = floor_to_int(s[j]);
    }
    if (out.integral) {
      auto [v, R, S] = evaluate(si);
      out.R = std::move(R);
      out.S = std::move(S);
    } else {
      out.R = Chain(cx, k);
      out.S = Chain(cx, k + 1);
    }
    return out;
  }

  // depth-first branch-and-bound on the LP relaxation
  struct Node {
    std::vector<std::int64_t> lo, hi;
    std::vector<char> has_lo, has_hi;
  };
  Rational best = mass(t);
  std::vector<std::int64_t> best_s(F, 0);
  std::vector<Node> stack;
  stack.push_back({lo, hi, has_lo, has_hi});
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    ++out.nodes;
    lp::Solution sol = prog.solve(node.lo, node.hi, node.has_lo, node.has_hi);
    ++out.lp_solves;
    if (sol.status != lp::Status::kOptimal) continue;
    if (sol.value >= best) continue;
    auto s = prog.s_values(sol);
    std::size_t branch = F;
    Rational best_frac = -1;
    std::vector<std::int64_t> rounded(F);
    for (std::size_t j = 0; j < F; ++j) {
      rounded[j] = nearest(s[j]);
      if (is_integer(s[j])) continue;
      Rational frac = s[j] - Rational(floor_to_int(s[j]));
      Rational dist = frac < Rational(1, 2) ? frac : Rational(1 - frac);
      if (dist > best_frac) {
        best_frac = dist;
        branch = j;
      }
    }
    auto [rv, R, S] = evaluate(rounded);
    if (rv < best) {
      best = rv;
      best_s = rounded;
    }
    if (branch == F) continue;
    const std::int64_t fl = floor_to_int(s[branch]);
    Node down = node, up = std::move(node);
    down.hi[branch] = fl;
    down.has_hi[branch] = 1;
    up.lo[branch] = fl + 1;
    up.has_lo[branch] = 1;
    // explore the nearer side first
    if (s[branch] - Rational(fl) < Rational(1, 2)) {
      stack.push_back(std::move(up));
      stack.push_back(std::move(down));
    } else {
      stack.push_back(std::move(down));
      stack.push_back(std::move(up));
    }
  }
  auto [v, R, S] = evaluate(best_s);
  out.value = v;
  out.R = std::move(R);
  out.S = std::move(S);
  for (const auto& [i, c] : out.R.coeffs()) out.relaxed_R[i] = Rational(c);
  for (const auto& [i, c] : out.S.coeffs()) out.relaxed_S[i] = Rational(c);
  return out;
}

}  // namespace

FlatDecomposition flat_norm(const Chain& t, FlatMode mode) {
  if (t.modulus()) throw InputError("flat_norm expects an integer chain; use flat_norm_mod_p");
  FlatDecomposition d = integer_flat_norm(t, mode);
  if (mode == FlatMode::kExact) verify_decomposition(t, d, std::nullopt);
  return d;
}

FlatDecomposition flat_norm_mod_p(const Chain& t_in, int p, FlatMode mode) {
  if (p < 2) throw InputError("modulus must be at least 2");
  if (t_in.modulus() && *t_in.modulus() != p) throw InputError("chain carries a different modulus");
  const Chain t = t_in.with_modulus(std::nullopt);
  const ComplexPtr& cx = t.complex_ptr();
  const int k = t.dim();

  // Q separates per simplex: for fixed S the best Q leaves the symmetric
  // residue of T - dS. Multiples of p in S are absorbed into Q, so S ranges
  // over residues only.
  std::vector<std::size_t> faces;
  for (std::size_t f = 0; f < cx->count(k + 1); ++f) faces.push_back(f);
  std::vector<std::size_t> rows;
  std::unordered_map<std::size_t, std::size_t> row_of;
  auto use_row = [&](std::size_t e) {
    if (row_of.emplace(e, rows.size()).second) rows.push_back(e);
  };
  for (const auto& [e, c] : t.coeffs()) use_row(e);
  for (std::size_t f : faces)
    for (std::uint32_t e : cx->faces(k + 1, f)) use_row(e);

  const std::size_t F = faces.size(), E = rows.size();
  std::vector<std::vector<std::pair<std::size_t, int>>> cofaces_of_face(F);
  std::vector<std::size_t> last_coface(E, 0);  // 1 + position of last coface, 0 if none
  for (std::size_t j = 0; j < F; ++j) {
    auto fc = cx->faces(k + 1, faces[j]);
    for (std::size_t s = 0; s < fc.size(); ++s) {
      std::size_t i = row_of.at(fc[s]);
      cofaces_of_face[j].emplace_back(i, s % 2 == 0 ? 1 : -1);
      last_coface[i] = j + 1;
    }
  }
  std::vector<std::vector<std::size_t>> settled_at(F + 1);
  for (std::size_t i = 0; i < E; ++i) settled_at[last_coface[i]].push_back(i);

  std::vector<std::int64_t> residual(E);
  for (std::size_t i = 0; i < E; ++i) residual[i] = t.coefficient(rows[i]);
  std::vector<std::int64_t> s(F, 0), best_s(F, 0);
  Rational best = mass_p(t, p);
  std::size_t nodes = 0;

  std::vector<std::int64_t> order{0};
  for (std::int64_t a = 1; 2 * a <= p; ++a) {
    order.push_back(a);
    if (2 * a != p) order.push_back(-a);
  }

  std::function<void(std::size_t, Rational)> dfs = [&](std::size_t depth, Rational bound) {
    ++nodes;
    for (std::size_t i : settled_at[depth]) {
      std::int64_t r = sym(residual[i], p);
      bound += cx->weight(k, rows[i]) * Rational(r < 0 ? -r : r);
    }
    if (bound >= best) return;
    if (depth == F) {
      best = bound;
      best_s = s;
      return;
    }
    for (std::int64_t v : order) {
      if (v != 0) {
        Rational next = bound + cx->weight(k + 1, faces[depth]) * Rational(v < 0 ? -v : v);
        if (next >= best) continue;
        for (auto [i, sg] : cofaces_of_face[depth]) residual[i] -= sg * v;
        s[depth] = v;
        dfs(depth + 1, next);
        for (auto [i, sg] : cofaces_of_face[depth]) residual[i] += sg * v;
        s[depth] = 0;
      } else {
        dfs(depth + 1, bound);
      }
    }
  };
  dfs(0, Rational(0));

  Chain S(cx, k + 1);
  for (std::size_t j = 0; j < F; ++j) S.add_term(faces[j], best_s[j]);
  Chain rest = t - boundary(S);
  Chain R = reduce_mod_p(rest, p).with_modulus(std::nullopt);
  Chain pq = rest - R;
  Chain Q(cx, k);
  for (const auto& [i, c] : pq.coeffs()) Q.add_term(i, c / p);

  FlatDecomposition out{mass(R) + mass(S), R, S, Q, false, {}, {}, true, 0, nodes};
  for (const auto& [i, c] : R.coeffs()) out.relaxed_R[i] = Rational(c);
  for (const auto& [i, c] : S.coeffs()) out.relaxed_S[i] = Rational(c);
  verify_decomposition(t, out, p);
  if (mode == FlatMode::kRelaxed) {
    // LP relaxation of F(T - pQ*) at the optimal integer Q*
    FlatDecomposition lpd = integer_flat_norm(t - p * Q, FlatMode::kRelaxed);
    lpd.Q = Q;
    lpd.relaxed = true;
    lpd.nodes += nodes;
    return lpd;
  }
  return out;
}

void verify_decomposition(const Chain& t_in, const FlatDecomposition& d, std::optional<int> p) {
  const Chain t = t_in.with_modulus(std::nullopt);
  Chain rebuilt = d.R + boundary(d.S);
  if (d.Q) {
    if (!p) throw InvariantError("Q present without a modulus");
    rebuilt += *p * *d.Q;
  }
  if (!(rebuilt == t)) throw InvariantError("flat decomposition does not reassemble T");
  if (mass(d.R) + mass(d.S) != d.value) throw InvariantError("flat decomposition value mismatch");
}

}  // namespace chainforge
