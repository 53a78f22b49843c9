#include <gtest/gtest.h>

#include "instances.hpp"
#include "mexp/families.hpp"
#include "oracles.hpp"

using namespace mexp;
using instances::subset;

namespace {

MeasuredGraph probability(const MeasuredGraph& g) {
  return g.with_measure(make_measure(g, {.kind = MeasureKind::probability}));
}

/// Probability measure with at least one zero and one positive entry, plus a
/// nonempty A inside the support with mu(A) <= 1/2.
std::optional<std::pair<MeasuredGraph, VertexSubset>> perturbation_instance(std::uint64_t seed) {
  Rng rng(seed);
  const auto base = instances::connected_measured(seed, 3, 10);
  std::vector<Rational> m;
  for (std::size_t v = 0; v < base.size(); ++v) m.push_back(rng.bernoulli(0.35) ? Rational(0) : base.measure(static_cast<Vertex>(v)));
  m[0] = 0;
  m[1] = base.measure(1);
  const Rational total = sum(m);
  for (auto& x : m) x /= total;
  const auto g = base.with_measure(m);
  VertexSubset a(g.size());
  std::vector<Vertex> support;
  for (Vertex v = 0; v < static_cast<Vertex>(g.size()); ++v) {
    if (m[v] > 0) support.push_back(v);
  }
  rng.shuffle(support.begin(), support.end());
  Rational ma = 0;
  for (Vertex v : support) {
    if (ma + m[v] > Rational(1, 2)) continue;
    if (!a.empty() && rng.bernoulli(0.5)) continue;
    a.insert(v);
    ma += m[v];
  }
  if (a.empty()) return std::nullopt;
  return std::make_pair(g, a);
}

}  // namespace

TEST(Generate, NamedGraphs) {
  const auto c6 = generate({GraphKind::cycle, 6, 0, 0, 0}, {.kind = MeasureKind::counting});
  EXPECT_EQ(c6.size(), 6u);
  EXPECT_EQ(c6.edges().size(), 6u);
  EXPECT_EQ(cheeger_vertex(generate_graph({GraphKind::complete, 4, 0, 0, 0})).value, 1);

  const auto r = generate_graph({GraphKind::random_regular, 10, 3, 0, 7});
  EXPECT_TRUE(r.connected());
  for (Vertex v = 0; v < 10; ++v) EXPECT_EQ(r.degree(v), 3u);
  const auto again = generate_graph({GraphKind::random_regular, 10, 3, 0, 7});
  EXPECT_TRUE(std::ranges::equal(r.edges(), again.edges()));

  EXPECT_THROW(generate_graph({GraphKind::random_regular, 9, 3, 0, 0}), PreconditionError);
  EXPECT_EQ(generate_graph({GraphKind::hypercube, 4, 0, 0, 0}).edges().size(), 32u);
}

TEST(Generate, RationalMeasuresAreSeeded) {
  const GraphSpec spec{GraphKind::cycle, 8, 0, 0, 0};
  const auto a = generate(spec, {.kind = MeasureKind::rationals, .seed = 5});
  const auto b = generate(spec, {.kind = MeasureKind::rationals, .seed = 5});
  EXPECT_TRUE(std::ranges::equal(a.measure(), b.measure()));
  EXPECT_TRUE(a.full_support());
}

TEST(ProductSegment, K2Example) {
  const auto k2 = probability(instances::complete(2));
  const auto seg = product_segment(k2, 1);
  EXPECT_EQ(seg.size(), 4u);
  EXPECT_EQ(seg.edges().size(), 4u);
  for (Vertex v = 0; v < 4; ++v) EXPECT_EQ(seg.degree(v), 2u);
  EXPECT_EQ(std::vector<Rational>(seg.measure().begin(), seg.measure().end()),
            (std::vector<Rational>{Rational(1, 2), Rational(1, 2), Rational(1, 4), Rational(1, 4)}));
  EXPECT_EQ(seg.total_measure(), Rational(3, 2));
}

TEST(ProductSegment, ZeroLevelsAndSliceMass) {
  const auto g = probability(generate_graph({GraphKind::random_regular, 10, 3, 0, 7}));
  const auto same = product_segment(g, 0);
  EXPECT_TRUE(std::ranges::equal(same.edges(), g.edges()));
  EXPECT_TRUE(std::ranges::equal(same.measure(), g.measure()));

  const auto seg = product_segment(g, 2);
  Rational slice = 0;
  for (std::size_t v = 20; v < 30; ++v) slice += seg.measure(static_cast<Vertex>(v));
  EXPECT_EQ(slice, Rational(1, 4));
  EXPECT_THROW(product_segment(instances::complete(3), 1), PreconditionError);
}

TEST(ProductSegment, CheegerBoundedBelow) {
  const auto g = probability(generate_graph({GraphKind::random_regular, 10, 3, 0, 7}));
  const Rational c = cheeger_vertex(g).value;
  const Rational floor_bound = std::min(Rational(c / 18), Rational(1, 8));
  for (int levels = 1; levels <= 2; ++levels) {
    EXPECT_GE(cheeger_vertex_exact(product_segment(g, levels)).value, floor_bound / 2);
  }
}

TEST(Perturbation, Example) {
  const auto g = MeasuredGraph::build(3, {{0, 1}, {1, 2}}, {Rational(1, 2), Rational(1, 2), Rational(0)});
  const auto m = full_support_perturbation(g, subset(g, {0}), 2);
  EXPECT_EQ(m, (std::vector<Rational>{Rational(3, 8), Rational(3, 8), Rational(1, 4)}));
}

TEST(Perturbation, Preconditions) {
  const auto full = probability(instances::cycle(4));
  EXPECT_THROW(full_support_perturbation(full, subset(full, {0}), 2), PreconditionError);
  const auto g = MeasuredGraph::build(3, {{0, 1}, {1, 2}}, {Rational(1, 2), Rational(1, 2), Rational(0)});
  EXPECT_THROW(full_support_perturbation(g, subset(g, {2}), 2), PreconditionError);
  EXPECT_THROW(full_support_perturbation(g, subset(g, {0, 1}), 2), PreconditionError);
  EXPECT_THROW(full_support_perturbation(g, subset(g, {0}), 0), PreconditionError);
}

TEST(Perturbation, RatioBoundAndMass) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const auto inst = perturbation_instance(seed);
    if (!inst) continue;
    const auto& [g, a] = *inst;
    for (int n : {1, 2, 3, 7, 50}) {
      const auto m = full_support_perturbation(g, a, n);
      EXPECT_EQ(sum(m), 1);
      EXPECT_TRUE(std::all_of(m.begin(), m.end(), [](const Rational& x) { return x > 0; }));
      EXPECT_TRUE(perturbation_bound(g, a, n).holds) << "seed " << seed << " n " << n;
    }
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(FamilyReport, CyclesLoseExpansion) {
  GraphFamily fam;
  for (int n = 4; n <= 14; n += 2) fam.members.push_back(instances::cycle(n));
  const auto rep = family_report(fam, Rational(1, 2));
  ASSERT_EQ(rep.rows.size(), 6u);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const int n = 4 + 2 * static_cast<int>(i);
    EXPECT_EQ(*rep.rows[i].cheeger, Rational(4, n));
    EXPECT_EQ(rep.rows[i].ghostliness, Rational(1, n));
  }
  EXPECT_EQ(*rep.min_cheeger, Rational(2, 7));
  EXPECT_FALSE(*rep.expander);
  EXPECT_EQ(rep.ghostly, Trend::consistent);
  EXPECT_EQ(rep.valency_bound, 2);
  EXPECT_EQ(*rep.ratio_bound, 1);
}

TEST(FamilyReport, ConstantFamilyIsNotGhostly) {
  GraphFamily fam;
  for (int i = 0; i < 4; ++i) fam.members.push_back(instances::cycle(6));
  const auto rep = family_report(fam, Rational(1, 2));
  EXPECT_EQ(rep.ghostly, Trend::inconsistent);
  EXPECT_TRUE(*rep.expander);
}

TEST(FamilyReport, RandomRegularGhostliness) {
  GraphFamily fam;
  for (int n = 8; n <= 16; n += 2) fam.members.push_back(generate_graph({GraphKind::random_regular, n, 3, 0, 1}));
  const auto rep = family_report(fam, Rational(1, 100));
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.ghostliness, Rational(1, static_cast<long>(row.vertices)));
    EXPECT_EQ(*row.cheeger, cheeger_vertex(fam.members[row.index]).value);
  }
  EXPECT_EQ(rep.ghostly, Trend::consistent);
}

TEST(FamilyReport, CapMarksRowsPartial) {
  GraphFamily fam;
  fam.members.push_back(instances::cycle(6));
  fam.members.push_back(instances::cycle(30));
  FamilyOptions opt;
  const auto rep = family_report(fam, Rational(1, 100), opt);
  EXPECT_TRUE(rep.partial);
  EXPECT_FALSE(rep.expander.has_value());
  EXPECT_FALSE(rep.rows[1].cheeger.has_value());

  opt.exact_beyond_cap = true;
  const auto exact = family_report(fam, Rational(1, 100), opt);
  EXPECT_FALSE(exact.partial);
  EXPECT_EQ(*exact.rows[1].cheeger, Rational(2, 15));
}

TEST(Ghostly, TrendRules) {
  const std::vector<Rational> falling{Rational(1, 2), Rational(1, 3), Rational(1, 4)};
  const std::vector<Rational> flat{Rational(1, 2), Rational(1, 2)};
  const std::vector<Rational> single{Rational(1, 2)};
  EXPECT_EQ(ghostly_trend(falling), Trend::consistent);
  EXPECT_EQ(ghostly_trend(flat), Trend::inconsistent);
  EXPECT_EQ(ghostly_trend(single), Trend::undetermined);
}

TEST(Certificate, CutoffForUniformCycle) {
  GraphFamily fam;
  fam.members.push_back(probability(instances::cycle(64)));
  const auto cert = generalised_certificate(fam, 1, RhoFunction::linear(1, 64));
  ASSERT_EQ(cert.members.size(), 1u);
  const auto& m = cert.members[0];
  EXPECT_EQ(m.gamma, Rational(1, 64));
  EXPECT_NEAR(m.cutoff, 3, 1e-12);
  EXPECT_FALSE(m.cheeger_exact);
  for (const auto& pm : m.pair_measure) EXPECT_GT(hop_distance(fam.members[0], pm.x, pm.y), 3);
  EXPECT_TRUE(cert.holds);
}

TEST(Certificate, PropertiesOnRegularFamily) {
  GraphFamily fam;
  for (int n : {16, 24, 32}) fam.members.push_back(probability(generate_graph({GraphKind::random_regular, n, 3, 0, 5})));
  for (double p : {1.0, 2.0}) {
    const auto cert = generalised_certificate(fam, p, RhoFunction::linear(1, 40));
    EXPECT_EQ(cert.valency, 3);
    EXPECT_EQ(cert.ratio, 1);
    EXPECT_GT(cert.kappa, 0);
    for (std::size_t i = 0; i < cert.members.size(); ++i) {
      const auto& m = cert.members[i];
      ASSERT_FALSE(m.skipped);
      EXPECT_TRUE(m.symmetric);
      EXPECT_TRUE(m.probability);
      EXPECT_TRUE(m.mass_at_least_eighth);
      EXPECT_GE(m.off_diagonal_mass, Rational(1, 8));
      EXPECT_GT(m.accepted_maps, 0u);
      EXPECT_LE(m.max_energy, 8 * cert.kappa);
      // Independent recomputation of the support condition and total mass.
      const auto d = oracle::floyd_warshall(fam.members[i]);
      Rational total = 0;
      for (const auto& pm : m.pair_measure) {
        EXPECT_GT(static_cast<double>(d[pm.x][pm.y]), m.cutoff);
        total += pm.mass;
      }
      EXPECT_EQ(total, 1);
    }
    EXPECT_TRUE(cert.holds);
  }
}

TEST(Certificate, RejectsNonLipschitzMaps) {
  GraphFamily fam;
  fam.members.push_back(probability(instances::cycle(64)));
  PointMap steep(64);
  for (int v = 0; v < 64; ++v) steep[v] = {10.0 * v};
  const auto cert = generalised_certificate(fam, 2, RhoFunction::linear(1, 64), {{steep}});
  ASSERT_EQ(cert.members[0].rejected.size(), 1u);
  EXPECT_EQ(cert.members[0].accepted_maps, 0u);
  EXPECT_EQ(cert.members[0].rejected[0].distance, 1);
}

TEST(Certificate, SmallMembersAreSkipped) {
  GraphFamily fam;
  fam.members.push_back(probability(instances::cycle(8)));
  const auto cert = generalised_certificate(fam, 1, RhoFunction::linear(1, 8));
  EXPECT_TRUE(cert.members[0].skipped);
}

TEST(Certificate, RhoExtendsByLastValue) {
  const RhoFunction rho({0, 1, 3});
  EXPECT_EQ(rho(2), 3);
  EXPECT_EQ(rho(9), 3);
  EXPECT_THROW(RhoFunction({1, 0}), InputError);
}
