#include <gtest/gtest.h>

#include "instances.hpp"
#include "mexp/theorems.hpp"

using namespace mexp;
using instances::subset;

namespace {

std::string input(const InequalityReport& r, const std::string& key) {
  for (const auto& [k, v] : r.inputs) {
    if (k == key) return v;
  }
  return {};
}

}  // namespace

TEST(CheegerSandwich, Examples) {
  const auto c6 = verify_cheeger_sandwich(auxiliary_walk(instances::cycle(6)));
  EXPECT_TRUE(c6.holds);
  EXPECT_EQ(input(c6, "c"), "1/3");
  EXPECT_EQ(*c6.comparisons[0].lhs_exact, Rational(1, 18));
  EXPECT_NEAR(c6.comparisons[0].rhs, 0.5, 1e-12);
  EXPECT_EQ(*c6.comparisons[1].rhs_exact, Rational(2, 3));

  const auto k2 = verify_cheeger_sandwich(auxiliary_walk(instances::complete(2)));
  EXPECT_TRUE(k2.holds);
  EXPECT_EQ(*k2.comparisons[0].lhs_exact, Rational(1, 2));
  EXPECT_NEAR(k2.comparisons[1].lhs, 2, 1e-12);
  EXPECT_EQ(*k2.comparisons[1].rhs_exact, 2);
}

TEST(CheegerSandwich, RandomWalksHold) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    EXPECT_TRUE(verify_cheeger_sandwich(instances::connected_walk(seed)).holds) << "seed " << seed;
  }
}

TEST(CheegerSandwich, ToleranceOnlyHelpsTheFavourableSide) {
  const auto c = compare_float("x <= y", 1.0 + 2e-8, 1.0, std::nullopt, std::nullopt, 1e-8);
  EXPECT_FALSE(c.holds);
  EXPECT_TRUE(compare_float("x <= y", 1.0 + 5e-9, 1.0, std::nullopt, std::nullopt, 1e-8).holds);
  EXPECT_FALSE(compare_exact("x <= y", Rational(1, 3) + Rational(1, 1000000000000LL), Rational(1, 3)).holds);
}

TEST(CheegerLowerBound, HeatKernelAuxiliaryMeasures) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto w = instances::connected_walk(seed, 3, 10);
    Rng rng(seed);
    const auto x0 = static_cast<Vertex>(rng.uniform_int(0, static_cast<std::int64_t>(w.size()) - 1));
    const int k = static_cast<int>(rng.uniform_int(1, 12));
    const auto m = heat_kernel_measure(w.graph(), x0, k);
    if (std::any_of(m.begin(), m.end(), [](const Rational& x) { return x == 0; })) continue;
    EXPECT_TRUE(verify_cheeger_lower_bound(w, m).holds) << "seed " << seed;
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(MeasuredSandwich, Examples) {
  const auto c6 = verify_measured_sandwich(instances::cycle(6));
  EXPECT_TRUE(c6.holds);
  EXPECT_EQ(*c6.comparisons[0].lhs_exact, Rational(1, 18));
  EXPECT_EQ(*c6.comparisons[1].rhs_exact, Rational(16, 3));

  const auto k2 = verify_measured_sandwich(instances::complete(2));
  EXPECT_TRUE(k2.holds);
  EXPECT_EQ(*k2.comparisons[0].lhs_exact, 1);
  EXPECT_NEAR(k2.comparisons[0].rhs, 4, 1e-12);
  EXPECT_EQ(*k2.comparisons[1].rhs_exact, 4);
}

TEST(GapControls, Examples) {
  const auto k2 = verify_gap_controls(instances::complete(2));
  EXPECT_TRUE(k2.holds);
  EXPECT_NEAR(k2.comparisons[0].lhs, 4, 1e-12);
  EXPECT_NEAR(k2.comparisons[1].rhs, 4, 1e-12);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_TRUE(verify_gap_controls(generate_graph({GraphKind::random_regular, 12, 3, 0, seed})).holds);
  }
}

TEST(MeasuredTheorems, RandomGraphsHold) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = instances::connected_measured(seed, 3, 10);
    EXPECT_TRUE(verify_measured_sandwich(g).holds) << "seed " << seed;
    EXPECT_TRUE(verify_gap_controls(g).holds) << "seed " << seed;
    EXPECT_TRUE(verify_poincare_to_cheeger_measured(g).holds) << "seed " << seed;
  }
}

TEST(PoincareToCheeger, Examples) {
  const auto c6 = verify_poincare_to_cheeger_measured(instances::cycle(6));
  EXPECT_TRUE(c6.holds);
  // s lambda/(2(1+s)K) with s = 1, K = 2 and Lambda gap 2.
  EXPECT_NEAR(c6.comparisons[0].lhs, 0.25, 1e-12);
  const auto k2 = verify_poincare_to_cheeger_measured(instances::complete(2));
  EXPECT_TRUE(k2.holds);
  EXPECT_NEAR(k2.comparisons[0].lhs, 1, 1e-12);
}

TEST(DistanceBound, Examples) {
  const auto c6g = instances::cycle(6);
  const auto w = from_conductance(c6g, std::vector<Rational>(6, Rational(2)));
  const auto r = distance_gap_bound(w, subset(c6g, {0}), subset(c6g, {3}));
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.comparisons[0].lhs, 4.5, 1e-12);
  EXPECT_EQ(*r.comparisons[0].rhs_exact, 6);

  const auto k2g = instances::complete(2);
  const auto k2 = distance_gap_bound(auxiliary_walk(k2g), subset(k2g, {0}), subset(k2g, {1}));
  EXPECT_TRUE(k2.holds);
  EXPECT_NEAR(k2.comparisons[0].lhs, k2.comparisons[0].rhs, 1e-12);
}

TEST(DistanceBound, Preconditions) {
  const auto c6g = instances::cycle(6);
  const auto w = auxiliary_walk(c6g);
  EXPECT_THROW(distance_gap_bound(w, subset(c6g, {0, 1}), subset(c6g, {1})), PreconditionError);
  EXPECT_THROW(distance_gap_bound(w, subset(c6g, {}), subset(c6g, {1})), PreconditionError);
}

TEST(DistanceBound, RandomTriplesHold) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto w = instances::connected_walk(seed);
    Rng rng(derive_seed(seed, 3));
    const std::size_t n = w.size();
    VertexSubset a(n), b(n);
    for (Vertex v = 0; v < static_cast<Vertex>(n); ++v) {
      const auto side = rng.uniform_int(0, 2);
      if (side == 0) a.insert(v);
      if (side == 1) b.insert(v);
    }
    if (a.empty()) a.insert(0);
    b.erase(0);
    if (b.empty()) {
      a.erase(static_cast<Vertex>(n - 1));
      b.insert(static_cast<Vertex>(n - 1));
    }
    if (a.empty()) a.insert(0);
    EXPECT_TRUE(distance_gap_bound(w, a, b).holds) << "seed " << seed;
  }
}

TEST(Coarea, VerifierIsExact) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto w = instances::connected_walk(seed);
    Rng rng(seed);
    const auto f = instances::random_nonnegative(rng, w.size());
    const auto r = verify_coarea(w, f);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.comparisons[0].lhs_exact, r.comparisons[0].rhs_exact);
  }
}

TEST(LpPoincare, RandomMapsAndOptimiser) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto w = instances::connected_walk(seed, 3, 9);
    Rng rng(seed);
    std::vector<PointMap> maps;
    for (int k = 0; k < 40; ++k) maps.push_back(as_point_map(instances::random_vector(rng, w.size())));
    for (double p : {1.0, 2.0, 3.0}) {
      EXPECT_TRUE(verify_lp_poincare(w, maps, p).holds);
      PoincareOptions popt;
      popt.restarts = 8;
      EXPECT_TRUE(verify_lp_poincare_optimised(w, p, popt).holds);
    }
  }
}

TEST(Reports, InputsReplayTheComputation) {
  const auto w = instances::connected_walk(17);
  const auto r = verify_cheeger_sandwich(w);
  EXPECT_EQ(input(r, "c"), to_string(cheeger_conductance(w).value));
  EXPECT_EQ(input(r, "lambda"), format_double(*spectral_gap(delta_operator(w))));
}
