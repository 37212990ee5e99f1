// Acceptance gate: one PASS/FAIL line per criterion.
// Usage: acceptance [N]   (N in 1..12 runs a single criterion)
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "chainforge/corpus.hpp"
#include "chainforge/ekeland.hpp"
#include "chainforge/filling.hpp"
#include "chainforge/io.hpp"
#include "chainforge/parallel.hpp"
#include "chainforge/slicing.hpp"
#include "chainforge/systolic.hpp"
#include "support.hpp"

using namespace testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

ComplexPtr coords_complex(std::size_t n, std::vector<Simplex> tops, std::vector<std::vector<Rational>> coords) {
  Geometry g;
  g.coords = std::move(coords);
  return WeightedComplex::build(n, std::move(tops), g);
}

std::vector<CorpusFile> corpus() { return corpus_files(CorpusOptions{}); }

ComplexPtr mesh_of(const CorpusFile& f) {
  return parse_off(f.bytes, f.name, f.edge_metric == "unit" ? EdgeMetric::kUnit : EdgeMetric::kEuclidean);
}

Outcome c1_mass_p() {
  Rng rng(101);
  std::size_t bad = 0;
  for (int it = 0; it < 200; ++it) {
    const int top = static_cast<int>(uniform(rng, 1, 3));
    auto cx = random_complex(rng, 6, top, static_cast<std::size_t>(uniform(rng, 1, 3)));
    const int dim = static_cast<int>(uniform(rng, 0, top));
    const int p = std::vector<int>{2, 3, 5, 7}[static_cast<std::size_t>(uniform(rng, 0, 3))];
    Chain t = random_chain(rng, cx, dim, p + 1, 6);
    const Rational want = brute_mass_p(t, p);
    if (mass_p(t, p) != want || mass_p(reduce_mod_p(t, p), p) != want) ++bad;
  }
  return {bad == 0, "200 chains, " + std::to_string(bad) + " mismatches"};
}

Outcome c2_flat_oracle() {
  std::ostringstream msg;
  bool ok = true;
  for (long s : {1L, 10L}) {
    auto cx = coords_complex(3, {{0, 1, 2}}, {{0, 0}, {3 * s, 0}, {0, 4 * s}});
    Chain t = boundary(Chain::all_simplices(cx, 2));
    const Rational want = std::min(mass(t), cx->weight(2, 0));
    const Rational got = flat_norm(t).value;
    ok = ok && got == want;
    msg << "triangle " << to_exact_string(got) << " (want " << to_exact_string(want) << "); ";
  }
  Rng rng(202);
  std::size_t compared = 0, compared_p = 0, bad = 0;
  for (int it = 0; it < 4000 && (compared < 60 || compared_p < 30); ++it) {
    auto cx = random_complex(rng, 6, 2, static_cast<std::size_t>(uniform(rng, 2, 6)), 15);
    if (cx->count(2) > 10) continue;
    // integer coordinates scaled up so that the box stays small
    std::vector<std::vector<Rational>> coords = cx->coords();
    for (auto& c : coords)
      for (auto& x : c) x *= 4;
    std::vector<Simplex> tops(cx->simplices(2).begin(), cx->simplices(2).end());
    cx = coords_complex(6, tops, coords);
    Chain t = random_chain(rng, cx, 1, 2, 4);
    if (compared < 60) {
      if (auto want = brute_flat(t, std::nullopt)) {
        ++compared;
        if (flat_norm(t).value != *want) ++bad;
      }
    } else {
      const int p = static_cast<int>(uniform(rng, 2, 3));
      if (auto want = brute_flat(t, p)) {
        ++compared_p;
        if (flat_norm_mod_p(t, p).value != *want) ++bad;
      }
    }
  }
  ok = ok && bad == 0 && compared >= 60 && compared_p >= 30;
  msg << compared << " integer + " << compared_p << " mod p instances vs enumeration, " << bad << " mismatches";
  return {ok, msg.str()};
}

Outcome c3_monotonicity() {
  Rng rng(303);
  std::size_t bad = 0;
  for (int it = 0; it < 500; ++it) {
    auto cx = random_complex(rng, 7, 3, static_cast<std::size_t>(uniform(rng, 1, 3)), 20);
    const int k = static_cast<int>(uniform(rng, 1, 2));
    const int p = std::vector<int>{2, 3, 5}[static_cast<std::size_t>(uniform(rng, 0, 2))];
    Chain t1 = random_chain(rng, cx, k, 2, 4);
    Chain t2 = random_chain(rng, cx, k, 2, 4);
    const Rational f1 = flat_norm(t1).value, f2 = flat_norm(t2).value;
    const Rational fp1 = flat_norm_mod_p(t1, p).value, fp2 = flat_norm_mod_p(t2, p).value;
    if (flat_norm(boundary(t1)).value > f1) ++bad;
    if (flat_norm_mod_p(boundary(t1), p).value > fp1) ++bad;
    if (flat_norm(t1 + t2).value > f1 + f2) ++bad;
    if (flat_norm_mod_p(t1 + t2, p).value > fp1 + fp2) ++bad;
    if (mass_p(t1, p) < fp1 || mass(t1) < f1 || fp1 > f1) ++bad;
  }
  return {bad == 0, "500 instances, " + std::to_string(bad) + " violations"};
}

Outcome c4_slices() {
  Rng rng(404);
  std::size_t bad = 0, mass_bad = 0;
  for (int it = 0; it < 500; ++it) {
    auto cx = random_complex(rng, 7, 3, static_cast<std::size_t>(uniform(rng, 1, 3)), 20);
    const int k = static_cast<int>(uniform(rng, 2, 3));
    if (cx->count(k) == 0) {
      --it;
      continue;
    }
    Chain t = random_chain(rng, cx, k, 3, 5);
    std::optional<int> p;
    if (uniform(rng, 0, 1) == 1) {
      p = static_cast<int>(uniform(rng, 2, 5));
      t = reduce_mod_p(t, *p);
    }
    std::vector<Rational> values;
    for (std::size_t v = 0; v < 7; ++v) values.push_back(Rational(uniform(rng, 0, 10)));
    VertexFunction u(values);
    const Rational r = Rational(2 * uniform(rng, -1, 11) + 1, 2);
    if (!(boundary(slice(t, u, r)) == -slice(boundary(t), u, r))) ++bad;
    Chain in = restrict_sublevel(t, u, r);
    Chain out = t - in;
    if (mass(in) + mass(out) != mass(t)) ++mass_bad;
    if (p && mass_p(in, *p) + mass_p(out, *p) != mass_p(t, *p)) ++mass_bad;
  }
  return {bad == 0 && mass_bad == 0,
          "500 (T,u,r), " + std::to_string(bad) + " identity and " + std::to_string(mass_bad) + " additivity violations"};
}

// mu(B_s(y)) with closed-from-above steps: atoms whose farthest vertex is <= d
Rational mass_upto(const MassMeasure& mu, Vertex y, const Rational& d, bool strict) {
  const WeightedComplex& cx = *mu.complex_ptr();
  Rational m = 0;
  for (const auto& [i, w] : mu.atoms()) {
    Rational far = 0;
    for (Vertex v : cx.simplex(mu.dim(), i)) far = std::max(far, cx.distance(y, v));
    if (strict ? far < d : far <= d) m += w;
  }
  return m;
}

Outcome c5_cover() {
  Rng rng(505);
  const Rational F(1, 2);
  std::size_t bad = 0, balls = 0;
  for (int it = 0; it < 100; ++it) {
    auto cx = random_complex(rng, 8, static_cast<int>(uniform(rng, 1, 2)), 5, 40);
    Chain t = random_chain(rng, cx, 1, 3, 8);
    MassMeasure mu = uniform(rng, 0, 1) ? mass_measure(t) : mass_measure_p(t, 2);
    if (mu.is_zero()) {
      --it;
      continue;
    }
    BallCover c;
    try {
      c = cover_balls(mu, F);
    } catch (const std::exception&) {
      ++bad;
      continue;
    }
    balls += c.balls.size();
    Rational sum = 0;
    for (const Ball& b : c.balls) {
      const Rational m = mass_upto(mu, b.center, b.radius, true);
      sum += m;
      if (m != b.mass || m < F * b.radius) ++bad;
      // mu(B_s) < F s for all s > r: check at every step above r
      for (const auto& [i, w] : mu.atoms()) {
        Rational far = 0;
        for (Vertex v : cx->simplex(1, i)) far = std::max(far, cx->distance(b.center, v));
        const Rational lo = std::max(far, b.radius);
        if (mass_upto(mu, b.center, lo, false) > F * lo) ++bad;
      }
      if (mass_upto(mu, b.center, b.radius, false) > F * b.radius) ++bad;
    }
    for (std::size_t i = 0; i < c.balls.size(); ++i)
      for (std::size_t j = i + 1; j < c.balls.size(); ++j)
        if (cx->distance(c.balls[i].center, c.balls[j].center) < 2 * c.balls[i].radius + 2 * c.balls[j].radius)
          ++bad;
    if (5 * sum < mu.total()) ++bad;
  }
  return {bad == 0, "100 measures, " + std::to_string(balls) + " balls, " + std::to_string(bad) + " violations"};
}

Outcome c6_decomposition() {
  Rng rng(606);
  std::size_t bad = 0, runs = 0, refused = 0, pieces = 0;
  double worst_diam = 0, worst_round = 0;
  auto modp = [](const Chain& c, int p) { return c.modulus() ? c : reduce_mod_p(c, p); };
  auto check = [&](const Chain& l, int p) {
    std::optional<CycleDecomposition> dd;
    try {
      dd = decompose_cycle(l, p);
    } catch (const InputError&) {
      ++refused;
      return;
    }
    const CycleDecomposition& d = *dd;
    ++runs;
    const WeightedComplex& cx = l.complex();
    Chain sum(l.complex_ptr(), l.dim(), p);
    Rational mass_sum = 0;
    for (const auto& piece : d.pieces) {
      ++pieces;
      const Rational m = mass_p(piece.chain, p);
      Rational diam = 0;
      auto sv = piece.chain.support_vertices();
      for (Vertex a : sv)
        for (Vertex b : sv) diam = std::max(diam, cx.distance(a, b));
      if (m != piece.mass || diam > 8 * m || !modp(boundary(piece.chain), p).is_zero()) ++bad;
      worst_diam = std::max(worst_diam, to_double(diam / m));
      sum += piece.chain;
      mass_sum += m;
    }
    if (!(sum + d.remainder == modp(l, p))) ++bad;
    if (mass_sum + mass_p(d.remainder, p) != mass_p(l, p) || d.total_mass != mass_p(l, p)) ++bad;
    Rational before = d.total_mass;
    for (const Rational& after : d.round_mass) {
      if (5 * after > 4 * before) ++bad;
      if (sgn(before) > 0) worst_round = std::max(worst_round, to_double(after / before));
      before = after;
    }
  };
  for (int it = 0; it < 150; ++it) {
    auto cx = random_complex(rng, 9, 2, 8, 40);
    const int p = std::vector<int>{2, 3, 5}[static_cast<std::size_t>(uniform(rng, 0, 2))];
    Chain l = reduce_mod_p(boundary(random_chain(rng, cx, 2, 2, 5)), p);
    if (!l.is_zero()) check(l, p);
  }
  for (int it = 0; it < 50; ++it) {
    const std::size_t k = static_cast<std::size_t>(uniform(rng, 2, 6));
    std::vector<std::vector<Rational>> coords;
    std::vector<Simplex> tops;
    for (std::size_t c = 0; c < k; ++c) {
      const long x = 1000 * static_cast<long>(c), y = uniform(rng, 0, 50), s = uniform(rng, 1, 6);
      coords.push_back({x, y, 0});
      coords.push_back({x + 3 * s, y, 0});
      coords.push_back({x, y + 4 * s, 0});
      const Vertex b = static_cast<Vertex>(3 * c);
      tops.push_back({b, b + 1, b + 2});
    }
    auto cx = coords_complex(3 * k, tops, coords);
    check(boundary(Chain::all_simplices(cx, 2)), 2);
  }
  for (std::size_t n : {12, 24, 48}) {
    auto cx = build_rips(circle_metric(n), Rational(static_cast<long>(n / 2)), 2);
    check(loop_chain(cx, n), 3);
  }
  const bool ok = bad == 0 && runs >= 150;
  return {ok, std::to_string(runs) + " cycles, " + std::to_string(pieces) + " pieces, " + std::to_string(refused) +
                  " refused, " + std::to_string(bad) + " violations; max diam/mass " + fmt(worst_diam) +
                  " (bound 8), max round ratio " + fmt(worst_round) + " (bound 0.8)"};
}

Outcome c7_circle_radius() {
  std::ostringstream msg;
  bool ok = true;
  for (std::size_t n : {12, 24, 48}) {
    const auto t0 = std::chrono::steady_clock::now();
    ClosedManifoldComplex m(polygon_circle(n, Rational(static_cast<long>(n))));
    SystoleReport r = verify_chain(m);
    const double ratio = to_double(r.fillrad / r.vol);
    const double err = std::abs(ratio * 6 - 1);
    if (n == 24 && err > 0.15) ok = false;
    if (n == 48 && err > 0.08) ok = false;
    const double secs = seconds_since(t0);
    if (n == 48 && secs >= 300) ok = false;
    msg << "n=" << n << " r*/C=" << to_exact_string(r.fillrad / r.vol) << " (" << fmt(secs) << "s) ";
  }
  return {ok, msg.str()};
}

Outcome c8_systolic() {
  std::ostringstream msg;
  bool ok = true;
  double worst = 0;
  for (const auto& f : corpus()) {
    if (f.name.rfind("torus_", 0) != 0 && f.name != "rp2_6.off") continue;
    ClosedManifoldComplex m(mesh_of(f));
    SystoleReport r = verify_chain(m);
    ok = ok && r.systolic_pass;
    worst = std::max(worst, r.sys_over_6fillrad);
    msg << f.name << " sys=" << fmt(to_double(*r.sys)) << " fillrad=" << fmt(to_double(r.fillrad))
        << (r.systolic_pass ? "" : " FAILS") << "; ";
  }
  msg << "max sys/(6 fillrad) " << fmt(worst);
  return {ok, msg.str()};
}

Outcome c9_loewner() {
  std::ostringstream msg;
  bool ok = true;
  auto run = [&](const std::string& name, const ComplexPtr& cx, bool hex) {
    LoewnerReport r = loewner_check(ClosedManifoldComplex(cx));
    ok = ok && r.pass;
    if (hex) {
      ok = ok && r.ratio >= 0.9;
      msg << name << " ratio " << fmt(r.ratio) << "; ";
    }
    if (!r.pass) msg << name << " FAILS; ";
  };
  for (const auto& f : corpus())
    if (f.kind.find("torus") != std::string::npos) run(f.name, mesh_of(f), f.kind == "hexagonal torus");
  for (std::size_t k = 3; k <= 6; ++k) run("square " + std::to_string(k), square_torus(k), false);
  run("rectangle 3x7", rectangular_torus(3, 7), false);
  for (std::size_t m = 3; m <= 8; ++m) run("hex " + std::to_string(m), hex_torus(m), true);
  return {ok, msg.str()};
}

Outcome c10_fundamental() {
  std::size_t bad = 0, count = 0;
  auto run = [&](const ComplexPtr& cx) {
    ClosedManifoldComplex m(cx);
    Chain fc = fundamental_class(m);
    const int n = m.dimension();
    Rational top = 0;
    for (std::size_t i = 0; i < cx->count(n); ++i) top += cx->weight(n, i);
    bool ok = fc.size() == cx->count(n) && reduce_mod_p(boundary(fc.with_modulus(std::nullopt)), 2).is_zero() &&
              mass_p(fc, 2) == top && m.volume() == top;
    for (const auto& [i, c] : fc.coeffs()) ok = ok && (c == 1 || c == -1);
    if (!ok) ++bad;
    ++count;
  };
  for (const auto& f : corpus())
    if (!f.edge_metric.empty()) run(mesh_of(f));
  run(tetrahedron_sphere());
  run(square_torus(4));
  run(hex_torus(4));
  run(rp2_six());
  run(klein_bottle(4, 4));
  run(klein_bottle(5, 6));
  return {bad == 0, std::to_string(count) + " surfaces, " + std::to_string(bad) + " failures"};
}

Outcome c11_ekeland() {
  std::size_t bad = 0, instances = 0, rows = 0;
  double worst = 0;
  auto descend = [&](const Chain& l, const Chain& seed_t, int p) {
    EkelandOptions o;
    o.epsilon = Rational(1, 2);
    o.restarts = 2;
    QuasiMinimizer q = quasi_minimize(l, seed_t, p, o);
    ++instances;
    if (q.trace.back() > 3 * q.seed_mass) ++bad;
    worst = std::max(worst, to_double(q.trace.back() / q.seed_mass));
    std::vector<Vertex> xs;
    std::vector<std::vector<Rational>> radii;
    auto ls = l.support_vertices();
    for (Vertex x : q.S.support_vertices()) {
      if (std::binary_search(ls.begin(), ls.end(), x)) continue;
      auto rs = default_radii(q.S, l, x);
      if (rs.empty()) continue;
      xs.push_back(x);
      radii.push_back(rs);
    }
    DensityProfile prof = density_profile(q, xs, radii);
    rows += prof.rows.size();
    if (!prof.nondecreasing) ++bad;
  };
  auto run = [&](const FiniteMetricSpace& space, const std::vector<Vertex>& walk, int p) {
    auto cx = build_rips(space, space.diameter(), 3);
    Chain l(cx, 1, p);
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
      Vertex a = walk[i], b = walk[i + 1];
      l.add_term(cx->index_of(a < b ? Simplex{a, b} : Simplex{b, a}), a < b ? 1 : -1);
    }
    if (l.is_zero()) return;
    descend(l, isoperimetric_fill(l, p).T, p);
  };
  // link loop of vertex 0 filled by its star, so the filling has an interior vertex
  auto star = [&](const WeightedComplex& mesh, const ComplexPtr& cx) {
    Chain seed(cx, 2, 2);
    for (const Simplex& t : mesh.simplices(2))
      if (t[0] == 0) seed.add_term(cx->index_of(t), 1);
    descend(boundary(seed), seed, 2);
  };
  for (const auto& f : corpus()) {
    if (f.edge_metric.empty()) {
      FiniteMetricSpace space = parse_metric_csv(f.bytes, f.name);
      std::vector<Vertex> walk;
      for (std::size_t i = 0; i <= space.size(); ++i) walk.push_back(static_cast<Vertex>(i % space.size()));
      run(space, walk, 2);
      if (f.name.rfind("circle_", 0) == 0) run(space, walk, 3);
    } else {
      ClosedManifoldComplex m(mesh_of(f));
      SystoleResult s = systole(m);
      std::vector<Vertex> walk = s.loop;
      if (walk.empty()) {
        const Simplex& t = m.complex().simplex(2, 0);
        walk = {t[0], t[1], t[2], t[0]};
      }
      run(m.complex().metric(), walk, 2);
      star(m.complex(), m.complex_ptr());
      Rational longest = 0;
      for (std::size_t e = 0; e < m.complex().count(1); ++e) longest = std::max(longest, m.complex().weight(1, e));
      star(m.complex(), build_rips(m.complex().metric(), longest, 3));
    }
  }
  return {bad == 0, std::to_string(instances) + " instances, " + std::to_string(rows) + " density rows, " +
                        std::to_string(bad) + " violations; max mass/seed " + fmt(worst) + " (bound 3)"};
}

Outcome c12_constants() {
  return {true,
          "existence-only constants gamma_k, C_k, c(n) are not asserted numerically; empirical envelopes are "
          "reported by C6-C8 and exact oracles by C1-C5"};
}

struct Criterion {
  int id;
  double limit_s;  // 0: none
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  configure_threads();
  const std::vector<Criterion> all{
      {1, 10, c1_mass_p},       {2, 30, c2_flat_oracle}, {3, 60, c3_monotonicity},  {4, 0, c4_slices},
      {5, 0, c5_cover},         {6, 0, c6_decomposition}, {7, 300, c7_circle_radius}, {8, 600, c8_systolic},
      {9, 0, c9_loewner},       {10, 0, c10_fundamental}, {11, 0, c11_ekeland},      {12, 0, c12_constants}};
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    if (c.limit_s > 0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt(c.limit_s) + "s limit";
    }
    std::printf("%s C%d %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", c.id, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
