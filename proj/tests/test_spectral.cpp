#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "instances.hpp"
#include "mexp/spectral.hpp"
#include "oracles.hpp"

using namespace mexp;

TEST(Spectrum, K2Delta) {
  for (int a : {1, 2, 7}) {
    const auto w = from_conductance(instances::complete(2), {Rational(a)});
    const auto sp = spectrum(delta_operator(w));
    ASSERT_EQ(sp.eigenvalues.size(), 2u);
    EXPECT_NEAR(sp.eigenvalues[0], 0.0, 1e-10);
    EXPECT_NEAR(sp.eigenvalues[1], 2.0, 1e-10);
  }
}

TEST(Spectrum, K2Lambda) {
  const auto sp = spectrum(lambda_operator(instances::complete(2)));
  EXPECT_NEAR(sp.eigenvalues[0], 0.0, 1e-10);
  EXPECT_NEAR(sp.eigenvalues[1], 4.0, 1e-10);
}

TEST(Spectrum, CycleGapMatchesCirculantOracle) {
  for (int n = 3; n <= 24; ++n) {
    const auto g = instances::cycle(n);
    const auto op = delta_operator(auxiliary_walk(g));
    const auto sp = spectrum(op);
    ASSERT_TRUE(sp.gap.has_value());
    EXPECT_NEAR(*sp.gap, oracle::cycle_walk_gap(n), 1e-9) << "n=" << n;
    std::vector<double> f;
    for (int j = 0; j < n; ++j) f.push_back(std::cos(2 * std::numbers::pi * j / n));
    EXPECT_LT(eigen_residual(op, oracle::cycle_walk_gap(n), f), 1e-9);
  }
}

TEST(Spectrum, C6Values) {
  const auto c6 = instances::cycle(6);
  EXPECT_NEAR(*spectral_gap(delta_operator(auxiliary_walk(c6))), 0.5, 1e-12);
  // Lambda on C6 with counting measure: a = 2 on edges and unit mass, so twice
  // the combinatorial Laplacian gap 2(1 - cos(pi/3)).
  EXPECT_NEAR(*spectral_gap(lambda_operator(c6)), 2 * 2 * (1 - std::cos(std::numbers::pi / 3)), 1e-10);
}

TEST(Spectrum, RegularLambdaIsTwiceValencyTimesDelta) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = generate_graph({GraphKind::random_regular, 10, 3, 0, seed});
    const double delta = *spectral_gap(delta_operator(auxiliary_walk(g)));
    const double lambda = *spectral_gap(lambda_operator(g));
    EXPECT_NEAR(lambda, 6 * delta, 1e-9);
  }
}

TEST(Spectrum, ZeroMultiplicityCountsComponents) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto g = instances::components_graph(seed);
    Rng rng(seed);
    const auto w = from_conductance(g, random_conductance(g, rng));
    const auto sp = spectrum(delta_operator(w));
    EXPECT_EQ(sp.zero_multiplicity, oracle::component_count(g)) << "seed " << seed;
  }
}

TEST(Spectrum, EigenpairsAndRange) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto w = instances::connected_walk(seed);
    const auto op = delta_operator(w);
    const auto sp = spectrum(op);
    for (std::size_t i = 0; i < sp.eigenvalues.size(); ++i) {
      EXPECT_GE(sp.eigenvalues[i], -1e-9);
      EXPECT_LE(sp.eigenvalues[i], 2 + 1e-9);
      EXPECT_LT(eigen_residual(op, sp.eigenvalues[i], sp.eigenvectors[i]), 1e-9);
      EXPECT_NEAR(rayleigh(op, sp.eigenvectors[i]), sp.eigenvalues[i], 1e-9);
    }
    EXPECT_EQ(sp.zero_multiplicity, 1u);
    std::vector<double> ones(w.size(), 1.0);
    EXPECT_NEAR(quadratic_form(op, ones), 0.0, 1e-12 * std::max(1.0, op.stiffness.frobenius()));
  }
}

TEST(Spectrum, StiffnessIsExactlySymmetric) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto op = delta_operator(instances::connected_walk(seed));
    for (std::size_t i = 0; i < op.size(); ++i) {
      EXPECT_GT(op.mass[i], 0);
      for (std::size_t j = 0; j < op.size(); ++j) EXPECT_EQ(op.stiffness(i, j), op.stiffness(j, i));
    }
  }
}

TEST(Rayleigh, K2Antisymmetric) {
  const auto op = delta_operator(from_conductance(instances::complete(2), {Rational(1)}));
  const std::vector<double> f{1, -1};
  EXPECT_NEAR(rayleigh(op, f), 2.0, 1e-12);
}

TEST(Coarea, C4Example) {
  const auto w = from_conductance(instances::cycle(4), std::vector<Rational>(4, Rational(2)));
  const std::vector<Rational> f{1, 1, 0, 0};
  const auto r = coarea_check(w, f);
  EXPECT_EQ(r.direct, 4);
  EXPECT_EQ(r.level_sum, 4);
  EXPECT_TRUE(r.equal);
}

TEST(Coarea, ZeroFunction) {
  const auto w = auxiliary_walk(instances::cycle(5));
  const std::vector<Rational> f(5, Rational(0));
  const auto r = coarea_check(w, f);
  EXPECT_EQ(r.direct, 0);
  EXPECT_TRUE(r.equal);
}

TEST(Coarea, RandomExactIdentity) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto w = instances::connected_walk(seed);
    Rng rng(derive_seed(seed, 7));
    const auto f = instances::random_nonnegative(rng, w.size());
    EXPECT_TRUE(coarea_check(w, f).equal) << "seed " << seed;
  }
}

TEST(Coarea, RejectsNegativeValues) {
  const auto w = auxiliary_walk(instances::cycle(4));
  const std::vector<Rational> f{1, -1, 0, 0};
  EXPECT_THROW(coarea_check(w, f), PreconditionError);
}
