#include <gtest/gtest.h>

#include "chainforge/filling.hpp"
#include "chainforge/metric.hpp"
#include "support.hpp"

using namespace testing_support;

TEST(Net, SixPointCircleExample) {
  // six points on a circle of circumference 6, epsilon 3/2
  auto net = maximal_epsilon_net(circle_metric(6), Rational(3, 2));
  EXPECT_EQ(net, (std::vector<std::size_t>{0, 2, 4}));
}

TEST(Net, SeparatedAndCovering) {
  Rng rng(21);
  for (int it = 0; it < 30; ++it) {
    auto cx = random_complex(rng, 12, 1, 3, 100);
    const FiniteMetricSpace& m = cx->metric();
    const Rational eps = ratio(uniform(rng, 1, 8), 2);
    for (auto strategy : {NetStrategy::kIndexScan, NetStrategy::kFarthestPoint}) {
      auto net = maximal_epsilon_net(m, eps, strategy);
      for (std::size_t a = 0; a < net.size(); ++a)
        for (std::size_t b = a + 1; b < net.size(); ++b) EXPECT_GE(m(net[a], net[b]), eps);
      EXPECT_LT(covering_radius(m, net), eps);
    }
  }
}

TEST(Kuratowski, NonexpandingWithinFourEpsilon) {
  Rng rng(22);
  for (int it = 0; it < 20; ++it) {
    auto cx = random_complex(rng, 12, 1, 3, 100);
    const FiniteMetricSpace& m = cx->metric();
    const Rational eps(uniform(rng, 1, 6));
    Embedding e = kuratowski_embed(m, maximal_epsilon_net(m, eps));
    for (std::size_t x = 0; x < m.size(); ++x)
      for (std::size_t y = 0; y < m.size(); ++y) {
        EXPECT_LE(e.image_distance(x, y), m(x, y));
        EXPECT_LE(m(x, y), e.image_distance(x, y) + 4 * eps);
      }
    EXPECT_LE(distortion(m, e).expansion, Rational(1));
  }
}

TEST(Rips, ParallelMatchesSerial) {
  for (std::size_t n : {8, 13, 20}) {
    auto space = circle_metric(n);
    for (long s = 1; s <= static_cast<long>(n / 2); s += 2) {
      auto a = build_rips(space, Rational(s), 3);
      auto b = build_rips_serial(space, Rational(s), 3);
      ASSERT_EQ(a->dimension(), b->dimension());
      for (int d = 0; d <= a->dimension(); ++d) {
        EXPECT_EQ(a->simplices(d), b->simplices(d));
        for (std::size_t i = 0; i < a->count(d); ++i) EXPECT_EQ(a->weight(d, i), b->weight(d, i));
      }
    }
  }
}

TEST(Rips, CliqueCountsAndBudget) {
  auto cx = build_rips(circle_metric(10), Rational(5), 2);
  EXPECT_EQ(cx->count(1), 45u);
  EXPECT_EQ(cx->count(2), 120u);
  EXPECT_THROW(build_rips(circle_metric(30), Rational(15), 3, 1000), InputError);
}

TEST(Cover, PropertiesHold) {
  Rng rng(23);
  for (int it = 0; it < 40; ++it) {
    auto cx = random_complex(rng, 8, 1, 6, 40);
    Chain t = random_chain(rng, cx, 1, 3, 6);
    BallCover c = cover_balls(mass_measure(t));
    EXPECT_TRUE(c.property_a && c.property_b && c.property_c);
    for (const Ball& b : c.balls) EXPECT_EQ(ball_mass(mass_measure(t), b.center, b.radius), b.mass);
  }
}

TEST(Cover, CriticalRadiusIsTheLastQualifyingStep) {
  // unit segment: mu(B_s(0)) = 1 for s > 1, else 0
  Geometry g;
  g.coords = {{0}, {1}};
  auto cx = WeightedComplex::build(2, {{0, 1}}, g);
  MassMeasure mu = mass_measure(Chain::all_simplices(cx, 1));
  auto r = critical_radius(mu, 0, Rational(1, 2));
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, Rational(2));
}

TEST(Decompose, ClustersSplitIntoPieces) {
  std::vector<std::vector<Rational>> coords;
  std::vector<Simplex> tops;
  for (Vertex c = 0; c < 4; ++c) {
    long x = 1000 * c;
    coords.push_back({x, 0});
    coords.push_back({x + 3, 0});
    coords.push_back({x, 4});
    tops.push_back({3 * c, 3 * c + 1, 3 * c + 2});
  }
  Geometry g;
  g.coords = coords;
  auto cx = WeightedComplex::build(12, tops, g);
  Chain l = boundary(Chain::all_simplices(cx, 2));
  auto d = decompose_cycle(l, 2);
  EXPECT_EQ(d.pieces.size(), 4u);
  Chain sum(cx, 1, 2);
  for (const auto& p : d.pieces) {
    sum += p.chain;
    EXPECT_LE(p.diameter, 8 * p.mass);
  }
  EXPECT_TRUE(sum + d.remainder == reduce_mod_p(l, 2));
}

TEST(Cone, FillsWithinTheConeBound) {
  auto cx = build_rips(circle_metric(12), Rational(6), 2);
  Chain l = loop_chain(cx, 12, 2);
  for (Vertex apex = 0; apex < 12; ++apex) {
    ConeFill f = cone_fill(l, apex, 2);
    EXPECT_TRUE(boundary(f.T) == l);
    EXPECT_LE(f.mass, f.bound);
  }
}

TEST(FillingRadius, CircleIsOneSixth) {
  for (std::size_t n : {12, 18}) {
    auto space = circle_metric(n);
    auto cx = build_rips(space, space.diameter(), 2);
    Chain l = loop_chain(cx, n, 2);
    auto fr = filling_radius(l);
    EXPECT_EQ(fr.radius, ratio(static_cast<long>(n), 6));
    EXPECT_NO_THROW(verify_filling(fr.witness));
  }
}

TEST(FillingRadius, ParallelMatchesSerial) {
  Rng rng(24);
  for (int it = 0; it < 15; ++it) {
    auto cx = random_complex(rng, 8, 1, 4, 100);
    auto rips = build_rips(cx->metric(), cx->metric().diameter(), 2);
    Chain l = loop_chain(rips, 8, 2);
    for (auto rule : {NeighborhoodRule::kReach, NeighborhoodRule::kVertex}) {
      auto a = filling_radius(l, rule);
      auto b = filling_radius_serial(l, rule);
      EXPECT_EQ(a.radius, b.radius);
    }
  }
}

TEST(FillingRadius, RejectsNonBoundaries) {
  auto cx = build_rips(circle_metric(9), Rational(2), 2);
  EXPECT_THROW(filling_radius(loop_chain(cx, 9, 2)), InputError);
}

TEST(FillingVolume, ExactMatchesEnumeration) {
  auto space = circle_metric(6);
  auto cx = build_rips(space, space.diameter(), 2);
  Chain l = loop_chain(cx, 6, 2);
  // every 2-chain mod 2 on the 20 triangles, boundaries as edge bitmasks
  const std::size_t m = cx->count(2);
  std::vector<std::uint32_t> faces(m);
  for (std::size_t i = 0; i < m; ++i)
    for (auto f : cx->faces(2, i)) faces[i] ^= 1u << f;
  std::uint32_t target = 0;
  for (const auto& [i, c] : l.coeffs()) target ^= 1u << i;
  std::optional<Rational> best;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    std::uint32_t b = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) b ^= faces[i];
    if (b != target) continue;
    Rational w = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) w += cx->weight(2, i);
    if (!best || w < *best) best = w;
  }
  auto exact = filling_volume(l, 2, FillMode::kExact);
  EXPECT_EQ(exact.mass_T, *best);
  EXPECT_TRUE(exact.proven_optimal);
  EXPECT_GE(filling_volume(l, 2, FillMode::kGreedy).mass_T, *best);
}
