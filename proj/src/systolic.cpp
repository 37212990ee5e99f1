#include "chainforge/systolic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "chainforge/gf2.hpp"
#include "chainforge/parallel.hpp"

namespace chainforge {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

ClosedManifoldComplex::ClosedManifoldComplex(ComplexPtr complex) : complex_(std::move(complex)) {
  if (!complex_) throw InputError("manifold needs a complex");
  const int n = complex_->dimension();
  if (n < 1) throw InputError("closed manifold must have dimension at least 1");
  incidence_.assign(complex_->count(n - 1), 0);
  for (std::size_t i = 0; i < complex_->count(n); ++i)
    for (std::uint32_t f : complex_->faces(n, i)) ++incidence_[f];
  std::ostringstream bad;
  std::size_t violations = 0;
  for (std::size_t f = 0; f < incidence_.size(); ++f) {
    if (incidence_[f] == 2) continue;
    if (violations < 10)
      bad << (violations ? ", " : "") << to_string(complex_->simplex(n - 1, f)) << " on " << incidence_[f];
    ++violations;
  }
  if (violations)
    throw InputError("not a closed pseudo-manifold: " + std::to_string(violations) +
                     " faces without exactly two cofaces: " + bad.str());
  UnionFind uf(complex_->vertex_count());
  std::size_t parts = complex_->vertex_count();
  for (const Simplex& e : complex_->simplices(1))
    if (uf.unite(e[0], e[1])) --parts;
  if (parts != 1) throw InputError("manifold is not connected");
}

Rational ClosedManifoldComplex::volume() const {
  Rational v = 0;
  const int n = dimension();
  for (std::size_t i = 0; i < complex_->count(n); ++i) v += complex_->weight(n, i);
  return v;
}

long ClosedManifoldComplex::euler_characteristic() const {
  long chi = 0;
  for (int d = 0; d <= dimension(); ++d)
    chi += (d % 2 == 0 ? 1 : -1) * static_cast<long>(complex_->count(d));
  return chi;
}

bool ClosedManifoldComplex::orientable() const {
  const int n = dimension();
  const std::size_t top = complex_->count(n);
  std::vector<std::vector<std::pair<std::size_t, int>>> on_face(complex_->count(n - 1));
  for (std::size_t i = 0; i < top; ++i) {
    auto fc = complex_->faces(n, i);
    for (std::size_t j = 0; j < fc.size(); ++j) on_face[fc[j]].emplace_back(i, j % 2 == 0 ? 1 : -1);
  }
  std::vector<int> orient(top, 0);
  std::vector<std::size_t> stack{0};
  orient[0] = 1;
  while (!stack.empty()) {
    std::size_t s = stack.back();
    stack.pop_back();
    auto fc = complex_->faces(n, s);
    for (std::size_t j = 0; j < fc.size(); ++j) {
      int induced = orient[s] * (j % 2 == 0 ? 1 : -1);
      for (auto [t, sign] : on_face[fc[j]]) {
        if (t == s) continue;
        int want = -induced * sign;
        if (orient[t] == 0) {
          orient[t] = want;
          stack.push_back(t);
        } else if (orient[t] != want) {
          return false;
        }
      }
    }
  }
  return true;
}

Chain fundamental_class(const ClosedManifoldComplex& m) {
  Chain c = Chain::all_simplices(m.complex_ptr(), m.dimension(), 2);
  if (!boundary(c).is_zero()) throw InvariantError("fundamental class has nonzero boundary mod 2");
  return c;
}

CohomologyBasis h1_basis(const WeightedComplex& cx) {
  CohomologyBasis out;
  if (cx.dimension() < 1) return out;
  const std::size_t E = cx.count(1);
  out.edge_signature.assign(E, 0);
  UnionFind uf(cx.vertex_count());
  std::vector<std::int64_t> column_of(E, -1);
  std::size_t N = 0;
  for (std::size_t e = 0; e < E; ++e) {
    const Simplex& s = cx.simplex(1, e);
    if (!uf.unite(s[0], s[1])) column_of[e] = static_cast<std::int64_t>(N++);
  }
  std::vector<BitVector> rows;
  for (std::size_t t = 0; t < cx.count(2); ++t) {
    BitVector row(N);
    for (std::uint32_t e : cx.faces(2, t))
      if (column_of[e] >= 0) row.flip(static_cast<std::size_t>(column_of[e]));
    if (row.any()) rows.push_back(std::move(row));
  }
  // reduced row echelon form
  std::vector<std::size_t> pivot_cols;
  std::size_t lead = 0;
  for (std::size_t c = 0; c < N && lead < rows.size(); ++c) {
    std::size_t r = lead;
    while (r < rows.size() && !rows[r].test(c)) ++r;
    if (r == rows.size()) continue;
    std::swap(rows[r], rows[lead]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != lead && rows[i].test(c)) rows[i].xor_with(rows[lead]);
    pivot_cols.push_back(c);
    ++lead;
  }
  std::vector<char> is_pivot(N, 0);
  for (std::size_t c : pivot_cols) is_pivot[c] = 1;
  std::vector<std::uint64_t> col_signature(N, 0);
  for (std::size_t f = 0; f < N; ++f) {
    if (is_pivot[f]) continue;
    if (out.rank == 63) throw InputError("first Z_2 Betti number too large for signature search");
    const std::uint64_t bit = std::uint64_t{1} << out.rank++;
    col_signature[f] |= bit;
    for (std::size_t r = 0; r < pivot_cols.size(); ++r)
      if (rows[r].test(f)) col_signature[pivot_cols[r]] |= bit;
  }
  for (std::size_t e = 0; e < E; ++e)
    if (column_of[e] >= 0) out.edge_signature[e] = col_signature[static_cast<std::size_t>(column_of[e])];
  return out;
}

std::uint64_t signature(const CohomologyBasis& basis, const Chain& cycle) {
  if (cycle.dim() != 1) throw InputError("signature needs an edge chain");
  std::uint64_t s = 0;
  for (const auto& [e, c] : cycle.coeffs())
    if (c % 2 != 0) s ^= basis.edge_signature[e];
  return s;
}

namespace {

struct Adjacency {
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> out;  // (neighbor, edge)
};

Adjacency adjacency(const WeightedComplex& cx) {
  Adjacency a;
  a.out.resize(cx.vertex_count());
  for (std::size_t e = 0; e < cx.count(1); ++e) {
    const Simplex& s = cx.simplex(1, e);
    a.out[s[0]].emplace_back(s[1], e);
    a.out[s[1]].emplace_back(s[0], e);
  }
  return a;
}

struct LoopCandidate {
  std::optional<Rational> length;
  std::vector<Vertex> loop;
  std::vector<std::size_t> edges;
};

// Shortest closed walk at b with nonzero signature.
LoopCandidate shortest_essential_loop(const WeightedComplex& cx, const Adjacency& adj,
                                      const CohomologyBasis& basis, Vertex b) {
  const std::size_t S = std::size_t{1} << basis.rank;
  const std::size_t states = cx.vertex_count() * S;
  std::vector<std::optional<Rational>> dist(states);
  std::vector<std::size_t> pred(states, states), pred_edge(states, 0);
  using Item = std::pair<Rational, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  const std::size_t start = static_cast<std::size_t>(b) * S;
  dist[start] = Rational(0);
  queue.emplace(Rational(0), start);
  LoopCandidate out;
  while (!queue.empty()) {
    auto [d, state] = queue.top();
    queue.pop();
    if (d != *dist[state]) continue;
    const Vertex v = static_cast<Vertex>(state / S);
    const std::uint64_t sig = state % S;
    if (v == b && sig != 0) {
      out.length = d;
      for (std::size_t s = state; s != start; s = pred[s]) {
        out.loop.push_back(static_cast<Vertex>(s / S));
        out.edges.push_back(pred_edge[s]);
      }
      out.loop.push_back(b);
      std::reverse(out.loop.begin(), out.loop.end());
      return out;
    }
    for (auto [w, e] : adj.out[v]) {
      const std::size_t next = static_cast<std::size_t>(w) * S + (sig ^ basis.edge_signature[e]);
      Rational nd = d + cx.weight(1, e);
      if (!dist[next] || nd < *dist[next]) {
        dist[next] = nd;
        pred[next] = state;
        pred_edge[next] = e;
        queue.emplace(std::move(nd), next);
      }
    }
  }
  return out;
}

SystoleResult finish_systole(const ClosedManifoldComplex& m, const CohomologyBasis& basis,
                             std::vector<LoopCandidate>& per_base) {
  SystoleResult out;
  out.h1_rank = basis.rank;
  std::size_t best = per_base.size();
  for (std::size_t b = 0; b < per_base.size(); ++b) {
    if (!per_base[b].length) continue;
    if (best == per_base.size() || *per_base[b].length < *per_base[best].length) best = b;
  }
  if (best == per_base.size()) return out;
  out.sys = per_base[best].length;
  out.loop = per_base[best].loop;
  Chain w(m.complex_ptr(), 1, 2);
  for (std::size_t e : per_base[best].edges) w.add_term(e, 1);
  out.witness_signature = signature(basis, w);
  if (out.witness_signature == 0 || !boundary(w).is_zero())
    throw InvariantError("systole witness is not an essential cycle");
  out.witness = std::move(w);
  return out;
}

}  // namespace

SystoleResult systole_serial(const ClosedManifoldComplex& m) {
  const WeightedComplex& cx = m.complex();
  CohomologyBasis basis = h1_basis(cx);
  std::vector<LoopCandidate> per_base(cx.vertex_count());
  if (basis.rank > 0) {
    Adjacency adj = adjacency(cx);
    for (std::size_t b = 0; b < per_base.size(); ++b)
      per_base[b] = shortest_essential_loop(cx, adj, basis, static_cast<Vertex>(b));
  }
  return finish_systole(m, basis, per_base);
}

SystoleResult systole(const ClosedManifoldComplex& m) {
  const WeightedComplex& cx = m.complex();
  CohomologyBasis basis = h1_basis(cx);
  std::vector<LoopCandidate> per_base(cx.vertex_count());
  if (basis.rank > 0) {
    Adjacency adj = adjacency(cx);
    const long n = static_cast<long>(per_base.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(thread_count())
    for (long b = 0; b < n; ++b)
      per_base[static_cast<std::size_t>(b)] = shortest_essential_loop(cx, adj, basis, static_cast<Vertex>(b));
  }
  return finish_systole(m, basis, per_base);
}

FiniteMetricSpace edge_path_metric(const WeightedComplex& cx) {
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, Rational>> edges;
  for (std::size_t e = 0; e < cx.count(1); ++e) {
    const Simplex& s = cx.simplex(1, e);
    edges.push_back({{s[0], s[1]}, cx.weight(1, e)});
  }
  return shortest_path_metric(cx.vertex_count(), edges);
}

SystoleReport verify_chain(const ClosedManifoldComplex& m, const VerifyParams& params) {
  using clock = std::chrono::steady_clock;
  SystoleReport r;
  const int n = m.dimension();
  if (n > 2) throw InputError("verify supports closed curves and surfaces");
  r.n = n;
  r.vol = m.volume();
  r.epsilon = params.epsilon;

  auto t0 = clock::now();
  Chain cls = fundamental_class(m);
  if (n == 1) {
    r.sys = r.vol;
  } else {
    SystoleResult s = systole(m);
    r.sys = s.sys;
    r.loop = s.loop;
  }
  r.timings_ms.emplace_back("systole", elapsed_ms(t0));

  t0 = clock::now();
  FiniteMetricSpace metric = edge_path_metric(m.complex());
  auto net = maximal_epsilon_net(metric, params.epsilon, params.net_strategy);
  r.net_size = net.size();
  r.covering_radius = covering_radius(metric, net);
  Embedding emb = kuratowski_embed(metric, net);
  r.distortion = distortion(metric, emb);
  auto image = std::make_shared<const FiniteMetricSpace>(emb.image_metric());
  ComplexPtr ambient = build_rips(*image, image->diameter(), n + 1, params.simplex_budget);
  r.ambient_simplices = ambient->total_count();
  r.timings_ms.emplace_back("ambient", elapsed_ms(t0));

  Chain l(ambient, n, 2);
  for (const auto& [i, c] : cls.coeffs()) l.add_term(ambient->index_of(m.complex().simplex(n, i)), c);

  t0 = clock::now();
  FillingRadius fr = filling_radius(l, params.rule);
  r.fillrad = fr.radius;
  r.timings_ms.emplace_back("fillrad", elapsed_ms(t0));

  t0 = clock::now();
  std::optional<FillingCertificate> fill;
  if (params.fillvol_mode == FillMode::kExact) {
    fill = filling_volume(l, 2, FillMode::kExact);
  } else {
    try {
      fill = isoperimetric_fill(l, 2);
    } catch (const InputError&) {
    }
    for (Vertex apex = 0; apex < ambient->vertex_count(); ++apex) {
      ConeFill c = cone_fill(l, apex, 2);
      if (!fill || c.mass < fill->mass_T) fill = make_certificate(l, c.T, 2, "cone");
    }
  }
  r.fillvol = fill->mass_T;
  r.fillvol_method = fill->method;
  r.timings_ms.emplace_back("fillvol", elapsed_ms(t0));

  const double fillrad = to_double(r.fillrad);
  const double fillvol_root = std::pow(to_double(r.fillvol), 1.0 / (n + 1));
  const double vol_root = std::pow(to_double(r.vol), 1.0 / n);
  if (r.sys) {
    r.systolic_pass = *r.sys <= 6 * r.fillrad + 24 * r.covering_radius;
    r.systolic_strict = *r.sys <= 6 * r.fillrad;
    if (fillrad > 0) r.sys_over_6fillrad = to_double(*r.sys) / (6 * fillrad);
  } else {
    r.systolic_pass = r.systolic_strict = true;
  }
  if (fillvol_root > 0) r.fillrad_over_fillvol_root = 6 * fillrad / fillvol_root;
  if (vol_root > 0) {
    r.fillvol_root_over_vol_root = fillvol_root / vol_root;
    r.fillrad_over_vol_root = fillrad / vol_root;
  }
  return r;
}

LoewnerReport loewner_check(const ClosedManifoldComplex& m) {
  if (m.dimension() != 2 || m.euler_characteristic() != 0 || !m.orientable())
    throw InputError("Loewner check needs an orientable genus-one surface");
  SystoleResult s = systole(m);
  if (!s.sys || s.h1_rank != 2) throw InputError("Loewner check needs an orientable genus-one surface");
  LoewnerReport r;
  r.sys = *s.sys;
  r.area = m.volume();
  r.sys_squared = r.sys * r.sys;
  r.bound = 2.0 / std::sqrt(3.0) * to_double(r.area);
  r.ratio = to_double(r.sys_squared) / r.bound;
  r.strict = 3 * r.sys_squared * r.sys_squared <= 4 * r.area * r.area;
  // each rounded square root is off by at most half an ulp
  const Rational half_ulp = Rational(1) / Rational(mpz_class(1) << (kSqrtBits + 1));
  Rational sys_lo = r.sys - Rational(static_cast<long>(s.loop.size())) * half_ulp;
  if (sgn(sys_lo) < 0) sys_lo = 0;
  const Rational area_hi = r.area + Rational(static_cast<long>(m.complex().count(2))) * half_ulp;
  r.pass = 3 * sys_lo * sys_lo * sys_lo * sys_lo <= 4 * area_hi * area_hi;
  return r;
}

namespace {

using EdgeLength = std::function<Rational(Vertex, Vertex)>;
using TriangleWeight = std::function<Rational(const Simplex&)>;

ComplexPtr surface(std::size_t n, const std::vector<Simplex>& tops, const EdgeLength& length,
                   const TriangleWeight& area) {
  std::map<Simplex, Rational> weighted;
  std::vector<std::pair<std::pair<std::size_t, std::size_t>, Rational>> edges;
  for (Simplex t : tops) {
    if (canonicalize(t) == 0) throw InputError("degenerate generator simplex");
    if (t.size() == 3) weighted[t] = area(t);
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = i + 1; j < t.size(); ++j) {
        Simplex e{t[i], t[j]};
        if (weighted.emplace(e, length(t[i], t[j])).second) edges.push_back({{t[i], t[j]}, weighted[e]});
      }
  }
  auto metric = std::make_shared<const FiniteMetricSpace>(shortest_path_metric(n, edges));
  std::vector<std::pair<Simplex, Rational>> list(weighted.begin(), weighted.end());
  Geometry g;
  g.metric = metric;
  return WeightedComplex::build_weighted(n, list, g);
}

Rational equilateral_area() { return sqrt_rounded(Rational(3, 16)); }

}  // namespace

std::vector<Simplex> square_torus_triangles(std::size_t a, std::size_t b) {
  if (a < 3 || b < 3) throw InputError("torus grid needs at least 3x3 vertices");
  auto id = [&](std::size_t i, std::size_t j) { return static_cast<Vertex>((i % a) * b + (j % b)); };
  std::vector<Simplex> tris;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
    }
  return tris;
}

std::vector<Simplex> hex_torus_triangles(std::size_t m) { return square_torus_triangles(m, m); }

ComplexPtr rectangular_torus(std::size_t a, std::size_t b) {
  const Rational diag = sqrt_rounded(Rational(2));
  auto length = [&](Vertex u, Vertex v) {
    std::size_t iu = u / b, ju = u % b, iv = v / b, jv = v % b;
    bool same_row = iu == iv, same_col = ju == jv;
    return (same_row || same_col) ? Rational(1) : diag;
  };
  return surface(a * b, square_torus_triangles(a, b), length, [](const Simplex&) { return Rational(1, 2); });
}

ComplexPtr square_torus(std::size_t k) { return rectangular_torus(k, k); }

ComplexPtr hex_torus(std::size_t m) {
  return surface(m * m, hex_torus_triangles(m), [](Vertex, Vertex) { return Rational(1); },
                 [](const Simplex&) { return equilateral_area(); });
}

std::vector<Simplex> rp2_six_triangles() {
  const int t[10][3] = {{1, 2, 3}, {1, 3, 4}, {1, 4, 5}, {1, 5, 6}, {1, 6, 2},
                        {2, 3, 5}, {3, 4, 6}, {4, 5, 2}, {5, 6, 3}, {6, 2, 4}};
  std::vector<Simplex> tris;
  for (const auto& row : t)
    tris.push_back({static_cast<Vertex>(row[0] - 1), static_cast<Vertex>(row[1] - 1),
                    static_cast<Vertex>(row[2] - 1)});
  return tris;
}

ComplexPtr rp2_six() {
  return surface(6, rp2_six_triangles(), [](Vertex, Vertex) { return Rational(1); },
                 [](const Simplex&) { return equilateral_area(); });
}

std::vector<Simplex> klein_bottle_triangles(std::size_t m, std::size_t n) {
  if (m < 4 || n < 4) throw InputError("Klein bottle grid needs at least 4x4 vertices");
  // (i, n) is glued to (-i mod m, 0)
  auto id = [&](std::size_t i, std::size_t j) {
    i %= m;
    if (j == n) return static_cast<Vertex>(((m - i) % m) * n);
    return static_cast<Vertex>(i * n + j);
  };
  std::vector<Simplex> tris;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
    }
  return tris;
}

ComplexPtr klein_bottle(std::size_t m, std::size_t n) {
  return surface(m * n, klein_bottle_triangles(m, n), [](Vertex, Vertex) { return Rational(1); },
                 [](const Simplex&) { return equilateral_area(); });
}

ComplexPtr tetrahedron_sphere() {
  std::vector<Simplex> tris{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  return surface(4, tris, [](Vertex, Vertex) { return Rational(1); },
                 [](const Simplex&) { return equilateral_area(); });
}

ComplexPtr polygon_circle(std::size_t n, const Rational& circumference) {
  if (n < 3) throw InputError("polygon needs at least 3 vertices");
  if (sgn(circumference) <= 0) throw InputError("circumference must be positive");
  std::vector<Simplex> edges;
  for (std::size_t i = 0; i < n; ++i)
    edges.push_back({static_cast<Vertex>(i), static_cast<Vertex>((i + 1) % n)});
  const Rational side = circumference / Rational(static_cast<long>(n));
  return surface(n, edges, [&](Vertex, Vertex) { return side; }, [](const Simplex&) { return Rational(1); });
}

}  // namespace chainforge
