#include "chainforge/ekeland.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "chainforge/flatnorm.hpp"
#include "chainforge/parallel.hpp"

namespace chainforge {

namespace {

struct Move {
  std::size_t tau;
  std::int64_t c;
};

class Search {
 public:
  Search(const Chain& seed, int p, const Rational& epsilon)
      : cx_(seed.complex()), k1_(seed.dim()), p_(p), epsilon_(epsilon) {
    coef_.assign(cx_.count(k1_), 0);
    for (const auto& [i, c] : seed.coeffs()) coef_[i] = symmetric_residue(c, p);
    for (std::size_t t = 0; t < cx_.count(k1_ + 1); ++t) {
      Rational w = 0;
      for (std::uint32_t f : cx_.faces(k1_ + 1, t)) w += cx_.weight(k1_, f);
      boundary_mass_.push_back(w);
      for (std::int64_t c = 1; 2 * c <= p; ++c) {
        moves_.push_back({t, c});
        if (2 * c != p) moves_.push_back({t, -c});
      }
    }
    mass_ = 0;
    for (std::size_t i = 0; i < coef_.size(); ++i) mass_ += cx_.weight(k1_, i) * Rational(std::abs(coef_[i]));
  }

  const std::vector<Move>& moves() const { return moves_; }
  const Rational& mass() const { return mass_; }

  // mass_p(S + g) + epsilon mass_p(g) - mass_p(S)
  Rational delta(const Move& m) const {
    Rational d = epsilon_ * boundary_mass_[m.tau] * Rational(m.c < 0 ? -m.c : m.c);
    auto fc = cx_.faces(k1_ + 1, m.tau);
    for (std::size_t j = 0; j < fc.size(); ++j) {
      const std::int64_t before = coef_[fc[j]];
      const std::int64_t after = symmetric_residue(before + (j % 2 == 0 ? m.c : -m.c), p_);
      if (after == before) continue;
      d += cx_.weight(k1_, fc[j]) * Rational(std::abs(after) - std::abs(before));
    }
    return d;
  }

  void apply(const Move& m) {
    auto fc = cx_.faces(k1_ + 1, m.tau);
    for (std::size_t j = 0; j < fc.size(); ++j) {
      std::int64_t& c = coef_[fc[j]];
      const std::int64_t after = symmetric_residue(c + (j % 2 == 0 ? m.c : -m.c), p_);
      mass_ += cx_.weight(k1_, fc[j]) * Rational(std::abs(after) - std::abs(c));
      c = after;
    }
  }

  Chain chain(const ComplexPtr& cx) const {
    Chain out(cx, k1_, p_);
    for (std::size_t i = 0; i < coef_.size(); ++i)
      if (coef_[i] != 0) out.add_term(i, coef_[i]);
    return out;
  }

 private:
  const WeightedComplex& cx_;
  int k1_;
  int p_;
  Rational epsilon_;
  std::vector<std::int64_t> coef_;
  std::vector<Rational> boundary_mass_;
  std::vector<Move> moves_;
  Rational mass_;
};

Chain as_mod(const Chain& t, int p) {
  if (t.modulus()) {
    if (*t.modulus() != p) throw InputError("chain carries a different modulus");
    return t;
  }
  return reduce_mod_p(t, p);
}

QuasiMinimizer run_restart(const Chain& l, const Chain& seed, int p, const EkelandOptions& o,
                           std::size_t restart) {
  Search search(seed, p, o.epsilon);
  QuasiMinimizer q{l, seed, p, o.epsilon, search.mass(), {search.mass()}, restart, 0, false};
  const auto& moves = search.moves();
  std::vector<std::size_t> order(moves.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (restart > 0) {
    std::mt19937_64 rng(o.seed + restart);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::size_t iterations = 0;
  bool improved = true;
  while (improved && iterations < o.max_iterations) {
    improved = false;
    if (restart == 0) {
      std::optional<std::size_t> best;
      Rational best_delta = 0;
      for (std::size_t i : order) {
        Rational d = search.delta(moves[i]);
        ++q.moves_checked;
        if (sgn(d) < 0 && (!best || d < best_delta)) {
          best = i;
          best_delta = d;
        }
      }
      if (best) {
        search.apply(moves[*best]);
        q.trace.push_back(search.mass());
        improved = true;
        ++iterations;
      }
    } else {
      for (std::size_t i : order) {
        ++q.moves_checked;
        if (sgn(search.delta(moves[i])) < 0) {
          search.apply(moves[i]);
          q.trace.push_back(search.mass());
          improved = true;
          if (++iterations >= o.max_iterations) break;
        }
      }
    }
  }
  q.S = search.chain(seed.complex_ptr());
  q.certified = true;
  for (const Move& m : moves)
    if (sgn(search.delta(m)) < 0) {
      q.certified = false;
      break;
    }
  return q;
}

std::pair<Chain, Chain> prepare(const Chain& l_in, const Chain& seed_in, int p, const EkelandOptions& o) {
  if (p < 2) throw InputError("modulus must be at least 2");
  if (sgn(o.epsilon) <= 0 || o.epsilon > Rational(1, 2)) throw InputError("epsilon must lie in (0, 1/2]");
  if (o.restarts == 0) throw InputError("at least one restart is needed");
  Chain l = as_mod(l_in, p);
  Chain seed = as_mod(seed_in, p);
  if (seed.dim() != l.dim() + 1 || seed.complex_ptr() != l.complex_ptr())
    throw InputError("seed filling must live one dimension above the cycle on the same complex");
  if (!(boundary(seed) == l)) throw InputError("infeasible seed: boundary differs from the cycle");
  return {l, seed};
}

QuasiMinimizer pick(std::vector<QuasiMinimizer>& runs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i)
    if (runs[i].trace.back() < runs[best].trace.back()) best = i;
  QuasiMinimizer q = std::move(runs[best]);
  verify_quasi_minimizer(q);
  return q;
}

}  // namespace

QuasiMinimizer quasi_minimize_serial(const Chain& l_in, const Chain& seed_in, int p, const EkelandOptions& o) {
  auto [l, seed] = prepare(l_in, seed_in, p, o);
  std::vector<QuasiMinimizer> runs;
  for (std::size_t r = 0; r < o.restarts; ++r) runs.push_back(run_restart(l, seed, p, o, r));
  return pick(runs);
}

QuasiMinimizer quasi_minimize(const Chain& l_in, const Chain& seed_in, int p, const EkelandOptions& o) {
  auto [l, seed] = prepare(l_in, seed_in, p, o);
  std::vector<std::optional<QuasiMinimizer>> slots(o.restarts);
  const long n = static_cast<long>(o.restarts);
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
  for (long r = 0; r < n; ++r)
    slots[static_cast<std::size_t>(r)] = run_restart(l, seed, p, o, static_cast<std::size_t>(r));
  std::vector<QuasiMinimizer> runs;
  for (auto& s : slots) runs.push_back(std::move(*s));
  return pick(runs);
}

void verify_quasi_minimizer(const QuasiMinimizer& q) {
  if (!(boundary(q.S.with_modulus(q.p)) == q.L.with_modulus(q.p)))
    throw InvariantError("quasi-minimizer lost feasibility");
  for (std::size_t i = 1; i < q.trace.size(); ++i)
    if (!(q.trace[i] < q.trace[i - 1])) throw InvariantError("objective trace is not strictly decreasing");
  if (mass_p(q.S, q.p) != q.trace.back()) throw InvariantError("trace does not end at the final mass");
  if (q.certified) {
    Search search(q.S, q.p, q.epsilon);
    for (const Move& m : search.moves())
      if (sgn(search.delta(m)) < 0) throw InvariantError("local Ekeland certificate fails");
  }
}

std::vector<Rational> default_radii(const Chain& s, const Chain& l, Vertex x) {
  const WeightedComplex& cx = s.complex();
  std::optional<Rational> tau;
  for (Vertex v : l.support_vertices())
    if (!tau || cx.distance(x, v) < *tau) tau = cx.distance(x, v);
  std::vector<Rational> ds;
  for (Vertex v : s.support_vertices()) {
    if (v == x) continue;
    const Rational& d = cx.distance(x, v);
    if (!tau || d < *tau) ds.push_back(d);
  }
  std::sort(ds.begin(), ds.end());
  ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
  std::vector<Rational> radii;
  if (ds.empty()) {
    if (tau) radii.push_back(*tau / 2);
    return radii;
  }
  radii.push_back(ds[0] / 2);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (i + 1 < ds.size())
      radii.push_back((ds[i] + ds[i + 1]) / 2);
    else if (tau)
      radii.push_back((ds[i] + *tau) / 2);
    else
      radii.push_back(ds[i] + 1);
  }
  return radii;
}

DensityProfile density_profile(const QuasiMinimizer& q, const std::vector<Vertex>& xs,
                               const std::vector<std::vector<Rational>>& radii) {
  if (xs.size() != radii.size()) throw InputError("one radius list per test vertex is needed");
  const Chain s = q.S.with_modulus(q.p);
  const WeightedComplex& cx = s.complex();
  const int k = q.L.dim();
  auto support = s.support_vertices();
  auto lsupport = q.L.support_vertices();
  DensityProfile out;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const Vertex x = xs[t];
    if (!std::binary_search(support.begin(), support.end(), x))
      throw InputError("vertex " + std::to_string(x) + " is outside the support of S");
    if (std::binary_search(lsupport.begin(), lsupport.end(), x))
      throw InputError("vertex " + std::to_string(x) + " lies on the support of L");
    std::optional<Rational> tau;
    for (Vertex v : lsupport)
      if (!tau || cx.distance(x, v) < *tau) tau = cx.distance(x, v);
    std::vector<Rational> rs = radii[t];
    std::sort(rs.begin(), rs.end());
    for (const Rational& rho : rs) {
      if (sgn(rho) <= 0 || (tau && rho >= *tau))
        throw InputError("radius " + to_exact_string(rho) + " outside (0, dist(x, supp L))");
      Rational m = 0;
      for (const auto& [i, c] : s.coeffs()) {
        bool touches = false;
        for (Vertex v : cx.simplex(s.dim(), i))
          if (cx.distance(v, x) < rho) touches = true;
        if (touches) m += cx.weight(s.dim(), i) * Rational(std::abs(c));
      }
      out.rows.push_back({x, rho, m, 0, 0});
    }
  }
  if (k >= 1) {
    const double kk = k;
    const double norm = std::pow(kk + 1, kk + 1);
    for (const auto& row : out.rows) {
      double rho = to_double(row.rho), m = to_double(row.mass);
      if (m <= 0) continue;
      double d = std::pow(std::pow(rho, kk + 1) / (norm * m), 1.0 / kk) / 3.0;
      out.delta = std::max(out.delta, d);
    }
    if (out.delta > 0) {
      const double coef = std::pow(3 * out.delta, -kk) / norm;
      const double c = std::pow(coef, 1.0 / (kk + 1));
      for (auto& row : out.rows) {
        double rho = to_double(row.rho);
        row.model = std::pow(rho, kk + 1) * coef;
        row.monotone_quantity = std::pow(to_double(row.mass), 1.0 / (kk + 1)) - c * rho;
      }
    }
  }
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    if (out.rows[i].x != out.rows[i - 1].x) continue;
    if (out.rows[i].mass < out.rows[i - 1].mass) out.nondecreasing = false;
    if (out.rows[i].monotone_quantity < out.rows[i - 1].monotone_quantity - 1e-12)
      out.monotone_quantity_nondecreasing = false;
  }
  return out;
}

}  // namespace chainforge
