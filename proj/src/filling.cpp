#include "chainforge/filling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

#include "chainforge/gf2.hpp"
#include "chainforge/parallel.hpp"
#include "chainforge/slicing.hpp"

namespace chainforge {

namespace {

Rational atom_reach(const WeightedComplex& cx, int dim, std::size_t index, Vertex y) {
  Rational r = 0;
  for (Vertex v : cx.simplex(dim, index))
    if (cx.distance(v, y) > r) r = cx.distance(v, y);
  return r;
}

// (distinct reach D_i, cumulative mass of atoms with reach <= D_i)
std::vector<std::pair<Rational, Rational>> mass_steps(const MassMeasure& mu, Vertex y) {
  const WeightedComplex& cx = *mu.complex_ptr();
  std::vector<std::pair<Rational, Rational>> atoms;
  for (const auto& [i, m] : mu.atoms()) atoms.emplace_back(atom_reach(cx, mu.dim(), i, y), m);
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<Rational, Rational>> steps;
  Rational acc = 0;
  for (const auto& [r, m] : atoms) {
    acc += m;
    if (!steps.empty() && steps.back().first == r)
      steps.back().second = acc;
    else
      steps.emplace_back(r, acc);
  }
  return steps;
}

Chain as_mod(const Chain& t, int p) {
  if (t.modulus()) {
    if (*t.modulus() != p) throw InputError("chain carries a different modulus");
    return t;
  }
  return reduce_mod_p(t, p);
}

void require_cycle(const Chain& l) {
  if (l.dim() < 1) throw InputError("cycle must have dimension at least 1");
  if (!boundary(l).is_zero()) throw InputError("chain is not a cycle mod " + std::to_string(*l.modulus()));
}

std::vector<Rational> distances_to(const WeightedComplex& cx, const std::vector<Vertex>& support) {
  std::vector<Rational> d(cx.vertex_count());
  for (std::size_t v = 0; v < d.size(); ++v) {
    bool first = true;
    for (Vertex s : support) {
      const Rational& x = cx.distance(static_cast<Vertex>(v), s);
      if (first || x < d[v]) d[v] = x;
      first = false;
    }
  }
  return d;
}

}  // namespace

Rational ball_mass(const MassMeasure& mu, Vertex y, const Rational& s) {
  const WeightedComplex& cx = *mu.complex_ptr();
  Rational total = 0;
  for (const auto& [i, m] : mu.atoms())
    if (atom_reach(cx, mu.dim(), i, y) < s) total += m;
  return total;
}

std::optional<Rational> critical_radius(const MassMeasure& mu, Vertex y, const Rational& F) {
  if (sgn(F) <= 0) throw InputError("F must be positive");
  auto steps = mass_steps(mu, y);
  std::optional<Rational> best;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    // mu(B_s) = M_i on (D_i, D_{i+1}]
    const auto& [d, m] = steps[i];
    Rational top = m / F;
    if (top <= d) continue;
    if (i + 1 < steps.size() && steps[i + 1].first < top) top = steps[i + 1].first;
    if (!best || top > *best) best = top;
  }
  return best;
}

BallCover cover_balls(const MassMeasure& mu, const Rational& F) {
  if (mu.is_zero()) throw InputError("cannot cover the zero measure");
  const WeightedComplex& cx = *mu.complex_ptr();
  std::vector<Vertex> centers;
  for (const auto& [i, m] : mu.atoms())
    for (Vertex v : cx.simplex(mu.dim(), i)) centers.push_back(v);
  std::sort(centers.begin(), centers.end());
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());

  std::vector<std::pair<Vertex, Rational>> radii;
  for (Vertex y : centers) {
    auto r = critical_radius(mu, y, F);
    if (!r) throw InputError("no admissible radius at vertex " + std::to_string(y) + " (F too large)");
    radii.emplace_back(y, *r);
  }
  std::stable_sort(radii.begin(), radii.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  BallCover cover;
  cover.F = F;
  cover.total = mu.total();
  cover.covered = 0;
  for (const auto& [y, r] : radii) {
    bool ok = true;
    for (const Ball& b : cover.balls)
      if (cx.distance(y, b.center) < 2 * r + 2 * b.radius) {
        ok = false;
        break;
      }
    if (!ok) continue;
    Rational m = ball_mass(mu, y, r);
    cover.covered += m;
    cover.balls.push_back({y, r, m});
  }

  cover.property_a = true;
  for (const Ball& b : cover.balls) {
    if (b.mass < F * b.radius) cover.property_a = false;
    auto steps = mass_steps(mu, b.center);
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (i + 1 < steps.size() && steps[i + 1].first <= b.radius) continue;
      Rational lo = steps[i].first > b.radius ? steps[i].first : b.radius;
      if (steps[i].second > F * lo) cover.property_a = false;
    }
    // below the first step the ball is empty
  }
  cover.property_b = true;
  for (std::size_t i = 0; i < cover.balls.size(); ++i)
    for (std::size_t j = i + 1; j < cover.balls.size(); ++j)
      if (cx.distance(cover.balls[i].center, cover.balls[j].center) <
          2 * cover.balls[i].radius + 2 * cover.balls[j].radius)
        cover.property_b = false;
  cover.property_c = 5 * cover.covered >= cover.total;
  if (!cover.property_a || !cover.property_b || !cover.property_c)
    throw InvariantError("ball cover failed properties (a)(b)(c)");
  return cover;
}

Rational support_diameter(const Chain& t) {
  auto vs = t.support_vertices();
  Rational d = 0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = i + 1; j < vs.size(); ++j)
      if (t.complex().distance(vs[i], vs[j]) > d) d = t.complex().distance(vs[i], vs[j]);
  return d;
}

Rational support_distance(const Chain& s, const Chain& l) {
  if (s.is_zero() || l.is_zero()) return 0;
  auto target = l.support_vertices();
  Rational out = 0;
  for (Vertex v : s.support_vertices()) {
    Rational best = s.complex().distance(v, target[0]);
    for (Vertex w : target)
      if (s.complex().distance(v, w) < best) best = s.complex().distance(v, w);
    if (best > out) out = best;
  }
  return out;
}

CycleDecomposition decompose_cycle(const Chain& l_in, int p, const Rational& F) {
  Chain l = as_mod(l_in, p);
  require_cycle(l);
  const WeightedComplex& cx = l.complex();
  CycleDecomposition out{{}, l, p, mass(l), {}, 0};
  Chain rem = l;
  while (!rem.is_zero() && out.rounds < kMaxDecompositionRounds) {
    const std::size_t round = out.rounds++;
    const Rational before = mass(rem);
    BallCover cover = cover_balls(mass_measure(rem), F);
    auto support = rem.support_vertices();
    Chain next = rem;
    for (const Ball& b : cover.balls) {
      std::vector<Rational> values(cx.vertex_count());
      for (std::size_t v = 0; v < values.size(); ++v) values[v] = cx.distance(static_cast<Vertex>(v), b.center);
      VertexFunction u(std::move(values));
      std::vector<Rational> cuts{b.radius};
      for (Vertex v : support)
        if (u(v) > b.radius && u(v) < 2 * b.radius) cuts.push_back(u(v));
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      cuts.push_back(2 * b.radius);
      std::optional<Rational> eta;
      for (std::size_t i = 0; i + 1 < cuts.size() && !eta; ++i) {
        Rational mid = (cuts[i] + cuts[i + 1]) / 2;
        if (slice(rem, u, mid).is_zero()) eta = mid;
      }
      if (!eta)
        throw InputError("no vanishing slice around vertex " + std::to_string(b.center) +
                         "; refine the complex");
      Chain piece = restrict_sublevel(rem, u, *eta);
      if (piece.is_zero()) continue;
      next -= piece;
      Rational m = mass(piece);
      Rational diam = support_diameter(piece);
      if (diam > 4 / F * m) throw InvariantError("piece diameter exceeds the mass bound");
      out.pieces.push_back({std::move(piece), b.center, b.radius, *eta, m, diam, round});
    }
    Rational after = mass(next);
    if (5 * after > 4 * before) throw InvariantError("decomposition round kept more than 4/5 of the mass");
    out.round_mass.push_back(after);
    rem = std::move(next);
  }
  out.remainder = rem;
  Rational total = mass(rem);
  for (const auto& piece : out.pieces) total += piece.mass;
  if (total != out.total_mass) throw InvariantError("decomposition does not conserve mass");
  return out;
}

ConeFill cone_fill(const Chain& l_in, Vertex apex, int p) {
  Chain l = as_mod(l_in, p);
  require_cycle(l);
  const WeightedComplex& cx = l.complex();
  if (apex >= cx.vertex_count()) throw InputError("apex is not a vertex of the complex");
  Chain t(l.complex_ptr(), l.dim() + 1, p);
  for (const auto& [i, c] : l.coeffs()) {
    const Simplex& s = cx.simplex(l.dim(), i);
    if (std::find(s.begin(), s.end(), apex) != s.end()) continue;
    Simplex cone{apex};
    cone.insert(cone.end(), s.begin(), s.end());
    int sign = canonicalize(cone);
    auto idx = cx.find(cone);
    if (!idx) throw InputError("cone over " + to_string(s) + " is not in the complex");
    t.add_term(*idx, sign * c);
  }
  if (!(boundary(t) == l)) throw InvariantError("cone boundary differs from the cycle");
  Rational reach = 0;
  for (Vertex v : l.support_vertices())
    if (cx.distance(apex, v) > reach) reach = cx.distance(apex, v);
  Rational m = mass(t);
  return {std::move(t), apex, m, reach, 2 * reach * mass(l)};
}

void verify_filling(const FillingCertificate& c) {
  Chain lhs = boundary(c.T.with_modulus(c.p));
  if (!(lhs == c.L.with_modulus(c.p))) throw InvariantError("filling boundary differs from the cycle");
}

FillingCertificate make_certificate(const Chain& l_in, Chain t, int p, std::string method) {
  Chain l = as_mod(l_in, p);
  t = as_mod(t, p);
  FillingCertificate c{l, t, p, mass(l), mass(t), 0, support_distance(t, l), std::move(method), false};
  if (sgn(c.mass_L) > 0) {
    const int k = l.dim();
    c.mass_ratio = to_double(c.mass_T) / std::pow(to_double(c.mass_L), static_cast<double>(k + 1) / k);
  }
  verify_filling(c);
  return c;
}

FillingCertificate isoperimetric_fill(const Chain& l_in, int p) {
  Chain l = as_mod(l_in, p);
  Chain t(l.complex_ptr(), l.dim() + 1, p);
  if (l.is_zero()) return make_certificate(l, t, p, "isoperimetric");
  CycleDecomposition d = decompose_cycle(l, p);
  for (const auto& piece : d.pieces) t += cone_fill(piece.chain, piece.center, p).T;
  if (!d.remainder.is_zero()) {
    std::optional<ConeFill> best;
    for (Vertex v : d.remainder.support_vertices()) {
      try {
        ConeFill c = cone_fill(d.remainder, v, p);
        if (!best || c.mass < best->mass) best = std::move(c);
      } catch (const InputError&) {
      }
    }
    if (!best) throw InputError("remainder of the decomposition has no cone filling");
    t += best->T;
  }
  return make_certificate(l, t, p, "isoperimetric");
}

Rational simplex_reach(const WeightedComplex& cx, int dim, std::size_t index,
                       const std::vector<Rational>& dist_to_support, NeighborhoodRule rule) {
  Rational r = 0;
  for (Vertex v : cx.simplex(dim, index))
    if (dist_to_support[v] > r) r = dist_to_support[v];
  if (rule == NeighborhoodRule::kReach) {
    Rational half = cx.diameter(dim, index) / 2;
    if (half > r) r = half;
  }
  return r;
}

namespace {

struct RadiusProblem {
  explicit RadiusProblem(Chain c) : l(std::move(c)) {}
  Chain l;
  std::size_t rows = 0;
  BitVector target;
  std::vector<std::size_t> order;   // (k+1)-simplices by reach
  std::vector<Rational> reach;      // per simplex index
  std::vector<Rational> candidates; // distinct reaches, ascending
  std::vector<std::size_t> group_end;  // order prefix length per candidate
};

RadiusProblem prepare_radius(const Chain& l_in, NeighborhoodRule rule) {
  RadiusProblem rp(as_mod(l_in, 2));
  require_cycle(rp.l);
  const WeightedComplex& cx = rp.l.complex();
  const int k = rp.l.dim();
  rp.rows = cx.count(k);
  rp.target = BitVector(rp.rows);
  for (const auto& [i, c] : rp.l.coeffs()) rp.target.set(i);
  auto dist = distances_to(cx, rp.l.support_vertices());
  const std::size_t n = cx.count(k + 1);
  rp.reach.resize(n);
  for (std::size_t i = 0; i < n; ++i) rp.reach[i] = simplex_reach(cx, k + 1, i, dist, rule);
  rp.order.resize(n);
  std::iota(rp.order.begin(), rp.order.end(), 0);
  std::stable_sort(rp.order.begin(), rp.order.end(),
                   [&](std::size_t a, std::size_t b) { return rp.reach[a] < rp.reach[b]; });
  for (std::size_t j = 0; j < n; ++j) {
    const Rational& r = rp.reach[rp.order[j]];
    if (rp.candidates.empty() || rp.candidates.back() != r) {
      rp.candidates.push_back(r);
      rp.group_end.push_back(j + 1);
    } else {
      rp.group_end.back() = j + 1;
    }
  }
  return rp;
}

BitVector column(const RadiusProblem& rp, std::size_t simplex) {
  BitVector col(rp.rows);
  for (std::uint32_t f : rp.l.complex().faces(rp.l.dim() + 1, simplex)) col.flip(f);
  return col;
}

bool probe(const RadiusProblem& rp, std::size_t candidate) {
  Gf2Eliminator elim(rp.rows, false);
  for (std::size_t j = 0; j < rp.group_end[candidate]; ++j) elim.add_column(column(rp, rp.order[j]));
  return elim.in_span(rp.target);
}

FillingCertificate witness(const RadiusProblem& rp, std::size_t candidate) {
  const std::size_t cols = rp.group_end[candidate];
  Gf2Eliminator elim(rp.rows, true, cols);
  for (std::size_t j = 0; j < cols; ++j) elim.add_column(column(rp, rp.order[j]));
  auto ids = elim.solve(rp.target);
  if (!ids) throw InvariantError("filling radius witness vanished");
  Chain t(rp.l.complex_ptr(), rp.l.dim() + 1, 2);
  for (std::size_t id : *ids) t.add_term(rp.order[id], 1);
  return make_certificate(rp.l, std::move(t), 2, "gf2");
}

FillingRadius zero_radius(const RadiusProblem& rp) {
  Chain t(rp.l.complex_ptr(), rp.l.dim() + 1, 2);
  return {Rational(0), make_certificate(rp.l, std::move(t), 2, "gf2"), rp.candidates, 0, {}};
}

[[noreturn]] void not_null_homologous() {
  throw InputError("cycle not null-homologous mod 2 in ambient");
}

}  // namespace

FillingRadius filling_radius_serial(const Chain& l, NeighborhoodRule rule) {
  RadiusProblem rp = prepare_radius(l, rule);
  if (rp.l.is_zero()) return zero_radius(rp);
  Gf2Eliminator elim(rp.rows, false);
  std::vector<std::pair<Rational, bool>> profile;
  std::size_t j = 0;
  for (std::size_t c = 0; c < rp.candidates.size(); ++c) {
    for (; j < rp.group_end[c]; ++j) elim.add_column(column(rp, rp.order[j]));
    bool ok = elim.in_span(rp.target);
    profile.emplace_back(rp.candidates[c], ok);
    if (ok) {
      FillingRadius out{rp.candidates[c], witness(rp, c), rp.candidates, c + 1, std::move(profile)};
      return out;
    }
  }
  not_null_homologous();
}

FillingRadius filling_radius(const Chain& l, NeighborhoodRule rule) {
  RadiusProblem rp = prepare_radius(l, rule);
  if (rp.l.is_zero()) return zero_radius(rp);
  const std::size_t m = rp.candidates.size();
  if (m == 0) not_null_homologous();
  const std::size_t workers = static_cast<std::size_t>(thread_count());
  // answer lies in [lo, hi]; known_solvable == m means hi is unconfirmed
  std::size_t lo = 0, known_solvable = m;
  std::size_t probes = 0;
  std::vector<std::pair<Rational, bool>> profile;
  while (lo < known_solvable) {
    const std::size_t hi = known_solvable - 1;
    std::vector<std::size_t> points;
    if (known_solvable == m) points.push_back(hi);
    const std::size_t span = hi - lo;
    for (std::size_t j = 0; points.size() < workers && j < workers; ++j)
      points.push_back(lo + span * (j + 1) / (workers + 1));
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    std::vector<char> result(points.size(), 0);
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(workers))
    for (std::size_t i = 0; i < points.size(); ++i) result[i] = probe(rp, points[i]) ? 1 : 0;
    probes += points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      profile.emplace_back(rp.candidates[points[i]], result[i] != 0);
      if (result[i]) {
        known_solvable = std::min(known_solvable, points[i]);
      } else {
        lo = std::max(lo, points[i] + 1);
      }
    }
    if (known_solvable == m && lo > hi) not_null_homologous();
  }
  std::sort(profile.begin(), profile.end());
  return {rp.candidates[known_solvable], witness(rp, known_solvable), rp.candidates, probes, std::move(profile)};
}

FillingCertificate filling_volume(const Chain& l_in, int p, FillMode mode, std::size_t node_limit) {
  Chain l = as_mod(l_in, p);
  require_cycle(l);
  if (mode == FillMode::kGreedy) return isoperimetric_fill(l, p);
  const WeightedComplex& cx = l.complex();
  const int k = l.dim();
  std::optional<FillingCertificate> greedy;
  try {
    greedy = isoperimetric_fill(l, p);
  } catch (const InputError&) {
  }
  ModPSystem sys;
  sys.p = p;
  sys.rows = cx.count(k);
  sys.rhs.assign(sys.rows, 0);
  for (const auto& [i, c] : l.coeffs()) sys.rhs[i] = c;
  const std::size_t n = cx.count(k + 1);
  sys.columns.resize(n);
  std::vector<Rational> weights(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto fc = cx.faces(k + 1, j);
    for (std::size_t s = 0; s < fc.size(); ++s) sys.columns[j].emplace_back(fc[s], s % 2 == 0 ? 1 : -1);
    weights[j] = cx.weight(k + 1, j);
  }
  std::optional<std::vector<std::int64_t>> incumbent;
  if (greedy) {
    incumbent.emplace(n, 0);
    for (const auto& [i, c] : greedy->T.coeffs()) (*incumbent)[i] = c;
  }
  auto best = min_weight_solution_mod_p(sys, weights, incumbent, node_limit);
  if (!best) throw InputError("cycle not null-homologous mod " + std::to_string(p) + " in ambient");
  Chain t(l.complex_ptr(), k + 1, p);
  for (std::size_t j = 0; j < n; ++j) t.add_term(j, best->solution[j]);
  FillingCertificate c = make_certificate(l, std::move(t), p, "exact");
  c.proven_optimal = best->proven_optimal;
  return c;
}

}  // namespace chainforge
