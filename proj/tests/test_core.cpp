#include <gtest/gtest.h>

#include "chainforge/gf2.hpp"
#include "chainforge/io.hpp"
#include "chainforge/lp.hpp"
#include "support.hpp"

using namespace testing_support;

TEST(Rational, ParsesExactForms) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-2/7"), Rational(-2, 7));
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
  EXPECT_THROW(parse_rational("x"), InputError);
  EXPECT_THROW(parse_rational("1/0"), InputError);
}

TEST(Rational, SqrtExactOnSquaresAndCloseOtherwise) {
  EXPECT_EQ(sqrt_rounded(Rational(9, 4)), Rational(3, 2));
  EXPECT_EQ(sqrt_rounded(Rational(0)), Rational(0));
  const Rational r = sqrt_rounded(Rational(2));
  EXPECT_LE(abs(r * r - 2), Rational(1, 1L << 30));
}

TEST(Chain, SymmetricResidueTiesGoUp) {
  EXPECT_EQ(symmetric_residue(1, 2), 1);
  EXPECT_EQ(symmetric_residue(-1, 2), 1);
  EXPECT_EQ(symmetric_residue(2, 4), 2);
  EXPECT_EQ(symmetric_residue(-2, 4), 2);
  EXPECT_EQ(symmetric_residue(4, 3), 1);
  EXPECT_EQ(symmetric_residue(-4, 3), -1);
  EXPECT_EQ(symmetric_residue(9, 3), 0);
}

TEST(Complex, TriangleWeightsFromCoordinates) {
  Geometry g;
  g.coords = {{0, 0}, {3, 0}, {0, 4}};
  auto cx = WeightedComplex::build(3, {{0, 1, 2}}, g);
  EXPECT_EQ(cx->count(1), 3u);
  EXPECT_EQ(cx->weight(2, 0), Rational(6));
  EXPECT_EQ(cx->weight(1, cx->index_of({1, 2})), Rational(5));
  EXPECT_EQ(cx->distance(1, 2), Rational(5));
}

TEST(Complex, BoundaryOfBoundaryVanishes) {
  Rng rng(1);
  for (int it = 0; it < 100; ++it) {
    auto cx = random_complex(rng, 7, 3, 3, 30);
    const int k = static_cast<int>(uniform(rng, 2, 3));
    Chain t = random_chain(rng, cx, k, 5, 6);
    EXPECT_TRUE(boundary(boundary(t)).is_zero());
    EXPECT_TRUE(boundary(boundary(reduce_mod_p(t, 3))).is_zero());
  }
}

TEST(Complex, FromTermsAppliesOrientation) {
  Geometry g;
  g.coords = {{0, 0}, {1, 0}, {0, 1}};
  auto cx = WeightedComplex::build(3, {{0, 1, 2}}, g);
  Chain c = Chain::from_terms(cx, 1, {{{1, 0}, 1}});
  EXPECT_EQ(c.coefficient(cx->index_of({0, 1})), -1);
  EXPECT_THROW(Chain::from_terms(cx, 1, {{{0, 0}, 1}}), InputError);
}

TEST(Complex, ReduceModPIsSymmetric) {
  Geometry g;
  g.coords = {{0}, {1}};
  auto cx = WeightedComplex::build(2, {{0, 1}}, g);
  Chain c(cx, 1);
  c.add_term(0, 5);
  EXPECT_EQ(reduce_mod_p(c, 3).coefficient(0), -1);
  EXPECT_EQ(reduce_mod_p(c, 5).size(), 0u);
}

TEST(Gf2, EliminatorSolvesTrackedSystems) {
  Gf2Eliminator e(4, true, 3);
  BitVector a(4), b(4), c(4);
  a.set(0), a.set(1);
  b.set(1), b.set(2);
  c.set(0), c.set(2);
  EXPECT_TRUE(e.add_column(a));
  EXPECT_TRUE(e.add_column(b));
  EXPECT_FALSE(e.add_column(c));
  EXPECT_EQ(e.rank(), 2u);
  BitVector t(4);
  t.set(0), t.set(2);
  auto sol = e.solve(t);
  ASSERT_TRUE(sol);
  BitVector sum(4);
  const std::vector<BitVector> cols{a, b, c};
  for (std::size_t i : *sol) sum.xor_with(cols[i]);
  EXPECT_EQ(sum, t);
  BitVector out(4);
  out.set(3);
  EXPECT_FALSE(e.in_span(out));
}

TEST(Gf2, ModPMinWeightMatchesEnumeration) {
  Rng rng(3);
  for (int it = 0; it < 50; ++it) {
    ModPSystem s;
    s.p = 3;
    s.rows = 3;
    const std::size_t n = 5;
    s.columns.resize(n);
    for (auto& col : s.columns)
      for (std::size_t r = 0; r < s.rows; ++r)
        if (long v = uniform(rng, -1, 1)) col.push_back({r, v});
    std::vector<long> x0(n);
    for (auto& x : x0) x = uniform(rng, -1, 1);
    s.rhs.assign(s.rows, 0);
    for (std::size_t j = 0; j < n; ++j)
      for (auto [r, v] : s.columns[j]) s.rhs[r] += v * x0[j];
    std::vector<Rational> w;
    for (std::size_t j = 0; j < n; ++j) w.push_back(ratio(uniform(rng, 1, 9), 2));
    std::optional<Rational> best;
    odometer(std::vector<long>(n, 1), [&](const std::vector<long>& x) {
      for (std::size_t r = 0; r < s.rows; ++r) {
        long acc = -s.rhs[r];
        for (std::size_t j = 0; j < n; ++j)
          for (auto [rr, v] : s.columns[j])
            if (rr == r) acc += v * x[j];
        if (((acc % 3) + 3) % 3 != 0) return;
      }
      Rational m = 0;
      for (std::size_t j = 0; j < n; ++j) m += w[j] * Rational(x[j] < 0 ? -x[j] : x[j]);
      if (!best || m < *best) best = m;
    });
    auto got = min_weight_solution_mod_p(s, w);
    ASSERT_TRUE(got);
    EXPECT_EQ(got->weight, *best);
  }
}

TEST(Lp, SolvesSmallPrograms) {
  lp::Problem pr;
  pr.num_vars = 2;
  pr.objective = {Rational(-1), Rational(-1)};
  pr.rows.push_back({{{0, Rational(1)}, {1, Rational(2)}}, lp::Sense::kLessEqual, Rational(4)});
  pr.rows.push_back({{{0, Rational(3)}, {1, Rational(1)}}, lp::Sense::kLessEqual, Rational(6)});
  auto s = lp::solve(pr);
  ASSERT_EQ(s.status, lp::Status::kOptimal);
  EXPECT_EQ(s.value, Rational(-14, 5));
  pr.rows.push_back({{{0, Rational(1)}}, lp::Sense::kGreaterEqual, Rational(10)});
  EXPECT_EQ(lp::solve(pr).status, lp::Status::kInfeasible);
  lp::Problem un;
  un.num_vars = 1;
  un.objective = {Rational(-1)};
  EXPECT_EQ(lp::solve(un).status, lp::Status::kUnbounded);
}

TEST(Io, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, OffDiagnosticsCarryLineNumbers) {
  try {
    parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1\n3 0 1 2\n", "bad.off");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.off:5:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n", "x.off"), InputError);
  // trailing color values on a face line are ignored
  EXPECT_EQ(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2 255 0 0\n", "c.off")->count(2), 1u);
}

TEST(Io, OffRoundTrip) {
  auto cx = parse_off("OFF\n3 1 0\n0 0 0\n3 0 0\n0 4 0\n3 0 1 2\n", "t.off");
  EXPECT_EQ(cx->weight(2, 0), Rational(6));
  auto again = parse_off(write_off(cx->coords(), cx->simplices(2)), "t2.off");
  EXPECT_EQ(again->weight(2, 0), Rational(6));
}

TEST(Io, MetricCsvRoundTripAndErrors) {
  FiniteMetricSpace m = parse_metric_csv("0,1/2,1\n1/2,0,1\n1,1,0\n", "m.csv");
  EXPECT_EQ(m(0, 1), Rational(1, 2));
  EXPECT_EQ(parse_metric_csv(write_metric_csv(m), "m2.csv")(1, 2), Rational(1));
  try {
    parse_metric_csv("0,1\n1,0,2\n", "m.csv");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("m.csv:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_metric_csv("0,1,5\n1,0,1\n5,1,0\n", "tri.csv"), InputError);
}

TEST(Io, ChainJsonRoundTrip) {
  Geometry g;
  g.coords = {{0, 0}, {1, 0}, {0, 1}};
  auto cx = WeightedComplex::build(3, {{0, 1, 2}}, g);
  Chain c = Chain::from_terms(cx, 1, {{{0, 1}, 2}, {{2, 1}, 1}});
  Chain back = chain_from_json(chain_to_json(c), cx, "c.json");
  EXPECT_TRUE(back == c);
  auto cx2 = complex_from_json(complex_to_json(*cx), "cx.json");
  EXPECT_EQ(cx2->count(2), 1u);
  EXPECT_EQ(cx2->weight(2, 0), cx->weight(2, 0));
  try {
    parse_json("{\n\"a\": 1,\n}", "j.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("j.json:3"), std::string::npos) << e.what();
  }
}
