#include <cmath>
#include <gtest/gtest.h>

#include <functional>

#include "chainforge/ekeland.hpp"
#include "chainforge/gf2.hpp"
#include "chainforge/systolic.hpp"
#include "support.hpp"

using namespace testing_support;

namespace {

// shortest simple edge cycle outside the span of the triangle boundaries mod 2
std::optional<Rational> brute_systole(const WeightedComplex& cx) {
  const std::size_t n = cx.vertex_count(), ne = cx.count(1);
  Gf2Eliminator tri(ne, false);
  for (std::size_t t = 0; t < cx.count(2); ++t) {
    BitVector col(ne);
    for (auto f : cx.faces(2, t)) col.set(f);
    tri.add_column(col);
  }
  std::vector<std::vector<std::pair<Vertex, std::size_t>>> adj(n);
  for (std::size_t e = 0; e < ne; ++e) {
    const Simplex& s = cx.simplex(1, e);
    adj[s[0]].push_back({s[1], e});
    adj[s[1]].push_back({s[0], e});
  }
  std::optional<Rational> best;
  std::vector<bool> on(n, false);
  std::vector<std::size_t> path;
  std::function<void(Vertex, Vertex, const Rational&)> dfs = [&](Vertex start, Vertex v, const Rational& len) {
    if (best && len >= *best) return;
    for (auto [w, e] : adj[v]) {
      const Rational next = len + cx.weight(1, e);
      if (w == start && path.size() >= 2) {
        if (best && next >= *best) continue;
        BitVector c(ne);
        for (std::size_t pe : path) c.set(pe);
        c.set(e);
        if (!tri.in_span(c)) best = next;
        continue;
      }
      if (w <= start || on[w]) continue;
      on[w] = true;
      path.push_back(e);
      dfs(start, w, next);
      path.pop_back();
      on[w] = false;
    }
  };
  for (Vertex s = 0; s < n; ++s) {
    on[s] = true;
    dfs(s, s, Rational(0));
    on[s] = false;
  }
  return best;
}

}  // namespace

TEST(Manifold, TopologyOfGenerators) {
  struct Case {
    ComplexPtr cx;
    long chi;
    bool orientable;
    std::size_t rank;
  };
  const std::vector<Case> cases{{tetrahedron_sphere(), 2, true, 0},
                                {square_torus(4), 0, true, 2},
                                {hex_torus(3), 0, true, 2},
                                {rp2_six(), 1, false, 1},
                                {klein_bottle(4, 4), 0, false, 2}};
  for (const auto& c : cases) {
    ClosedManifoldComplex m(c.cx);
    EXPECT_EQ(m.euler_characteristic(), c.chi);
    EXPECT_EQ(m.orientable(), c.orientable);
    EXPECT_EQ(h1_basis(m.complex()).rank, c.rank);
  }
}

TEST(Manifold, RejectsOpenSurfaces) {
  Geometry g;
  g.coords = {{0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(ClosedManifoldComplex(WeightedComplex::build(3, {{0, 1, 2}}, g)), InputError);
}

TEST(Systole, MatchesCycleEnumeration) {
  for (const auto& cx : {square_torus(3), rectangular_torus(3, 4), rp2_six(), klein_bottle(4, 4), hex_torus(3)}) {
    ClosedManifoldComplex m(cx);
    auto s = systole(m);
    auto want = brute_systole(*cx);
    ASSERT_TRUE(s.sys && want);
    EXPECT_EQ(*s.sys, *want);
    ASSERT_TRUE(s.witness);
    EXPECT_TRUE(boundary(*s.witness).is_zero());
    EXPECT_EQ(mass_p(*s.witness, 2), *s.sys);
    EXPECT_NE(signature(h1_basis(*cx), *s.witness), 0u);
  }
}

TEST(Systole, ParallelMatchesSerial) {
  for (const auto& cx : {square_torus(5), hex_torus(4), klein_bottle(5, 6), rp2_six()}) {
    ClosedManifoldComplex m(cx);
    auto a = systole(m);
    auto b = systole_serial(m);
    EXPECT_EQ(*a.sys, *b.sys);
    EXPECT_EQ(a.loop, b.loop);
  }
}

TEST(Systole, SphereHasNone) {
  auto s = systole(ClosedManifoldComplex(tetrahedron_sphere()));
  EXPECT_FALSE(s.sys);
  EXPECT_EQ(s.h1_rank, 0u);
}

TEST(Verify, CircleAndTorus) {
  ClosedManifoldComplex circle(polygon_circle(12, Rational(12)));
  auto r = verify_chain(circle);
  EXPECT_EQ(*r.sys, Rational(12));
  EXPECT_EQ(r.fillrad, Rational(2));
  EXPECT_TRUE(r.systolic_pass && r.systolic_strict);
  auto t = verify_chain(ClosedManifoldComplex(square_torus(3)));
  EXPECT_TRUE(t.systolic_pass);
  EXPECT_EQ(t.vol, Rational(9));
}

TEST(Loewner, FlatToriPass) {
  // sys^2 / area scaled so the hexagonal torus sits at 1
  const double h = std::sqrt(3.0) / 2;
  const std::vector<std::pair<ComplexPtr, double>> cases{
      {square_torus(4), h}, {rectangular_torus(3, 6), h / 2}, {hex_torus(5), 1.0}};
  for (const auto& [cx, want] : cases) {
    auto r = loewner_check(ClosedManifoldComplex(cx));
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.ratio, want, 1e-9);
  }
  EXPECT_THROW(loewner_check(ClosedManifoldComplex(rp2_six())), InputError);
}

TEST(Ekeland, DescendsAndCertifies) {
  auto space = circle_metric(10);
  auto cx = build_rips(space, space.diameter(), 3);
  Chain l = loop_chain(cx, 10, 2);
  Chain seed = cone_fill(l, 0, 2).T;
  EkelandOptions o;
  o.restarts = 3;
  o.seed = 5;
  auto q = quasi_minimize(l, seed, 2, o);
  EXPECT_TRUE(q.certified);
  EXPECT_TRUE(boundary(q.S) == l);
  EXPECT_LE(q.trace.back(), q.seed_mass);
  for (std::size_t i = 1; i < q.trace.size(); ++i) EXPECT_LT(q.trace[i], q.trace[i - 1]);
  auto s = quasi_minimize_serial(l, seed, 2, o);
  EXPECT_EQ(s.trace.back(), q.trace.back());
  EXPECT_EQ(s.restart, q.restart);
}

TEST(Ekeland, ValidatesInputs) {
  auto space = circle_metric(6);
  auto cx = build_rips(space, space.diameter(), 3);
  Chain l = loop_chain(cx, 6, 2);
  Chain seed = cone_fill(l, 0, 2).T;
  EkelandOptions o;
  o.epsilon = Rational(3, 4);
  EXPECT_THROW(quasi_minimize(l, seed, 2, o), InputError);
  o.epsilon = Rational(1, 2);
  Chain wrong(cx, 2, 2);
  wrong.add_term(0, 1);
  EXPECT_THROW(quasi_minimize(l, wrong, 2, o), InputError);
}

TEST(Ekeland, DensityProfileIsMonotone) {
  auto space = circle_metric(12);
  auto cx = build_rips(space, space.diameter(), 3);
  Chain l = loop_chain(cx, 12, 3);
  auto q = quasi_minimize(l, cone_fill(l, 6, 3).T, 3, EkelandOptions{});
  std::vector<Vertex> xs;
  std::vector<std::vector<Rational>> radii;
  auto ls = l.support_vertices();
  for (Vertex x : q.S.support_vertices())
    if (!std::binary_search(ls.begin(), ls.end(), x)) {
      xs.push_back(x);
      radii.push_back(default_radii(q.S, l, x));
    }
  auto prof = density_profile(q, xs, radii);
  EXPECT_TRUE(prof.nondecreasing);
}
