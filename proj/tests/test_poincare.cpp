#include <gtest/gtest.h>

#include <cmath>

#include "instances.hpp"
#include "mexp/cheeger.hpp"
#include "mexp/poincare.hpp"
#include "mexp/spectral.hpp"

using namespace mexp;

namespace {

/// Subtracts the mu-weighted mean coordinate-wise.
void centre(PointMap& f, std::span<const double> mu) {
  double total = 0;
  for (double x : mu) total += x;
  for (std::size_t k = 0; k < f[0].size(); ++k) {
    double mean = 0;
    for (std::size_t v = 0; v < f.size(); ++v) mean += f[v][k] * mu[v];
    mean /= total;
    for (auto& x : f) x[k] -= mean;
  }
}

PointMap random_map(Rng& rng, std::size_t n, std::size_t d) {
  PointMap f(n, std::vector<double>(d));
  for (auto& x : f) {
    for (auto& y : x) y = rng.normal();
  }
  return f;
}

}  // namespace

TEST(Constants, CpFormula) {
  EXPECT_DOUBLE_EQ(cp_formula(1, 1.5), 0.5);
  EXPECT_DOUBLE_EQ(cp_formula(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(cp_formula(1, 2), 1.0 / 32);
  EXPECT_NEAR(cp_formula(1, 4), 2.44140625e-4, 1e-15);
  EXPECT_THROW(cp_formula(0, 2), PreconditionError);
  EXPECT_THROW(cp_formula(1, 0.5), PreconditionError);
}

TEST(Constants, Kappa) {
  EXPECT_DOUBLE_EQ(kappa_constant(2, 0.5, 1, 1, 1), 12);
  EXPECT_DOUBLE_EQ(kappa_constant(2, 0.5, 1, 1, 0), 0);
  EXPECT_DOUBLE_EQ(kappa_constant(2, 0.5, 1, 1, 2), 24);
  EXPECT_DOUBLE_EQ(kappa_constant(2, 0.5, 1, 2, 3), 9 * kappa_constant(2, 0.5, 1, 2, 1));
}

TEST(Energy, OrderedIsTwiceUnordered) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto w = instances::connected_walk(seed, 3, 10);
    Rng rng(seed);
    const auto f = random_map(rng, w.size(), 1 + seed % 4);
    const auto a = to_doubles(w.conductance());
    const auto mu = to_doubles(w.stationary());
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      EXPECT_NEAR(edge_energy(w.graph(), a, f, p), 2 * edge_energy_unordered(w.graph(), a, f, p),
                  1e-12 * edge_energy(w.graph(), a, f, p));
      EXPECT_NEAR(pair_energy(mu, f, p), 2 * pair_energy_unordered(mu, f, p), 1e-12 * pair_energy(mu, f, p));
    }
  }
}

TEST(Energy, PairFormEqualsTwiceNormForMeanZero) {
  // K2 with mu = (2, 2), f = (1, -1): both sides are 8.
  const std::vector<double> mu{2, 2};
  const PointMap f{{1}, {-1}};
  EXPECT_DOUBLE_EQ(pair_energy(mu, f, 2), 8);
  EXPECT_DOUBLE_EQ(2 * weighted_norm_squared(mu, f), 8);

  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto w = instances::connected_walk(seed);
    const auto m = to_doubles(w.stationary());
    Rng rng(seed);
    auto g = random_map(rng, w.size(), 1 + seed % 4);
    centre(g, m);
    const double lhs = pair_energy(m, g, 2);
    EXPECT_NEAR(lhs, 2 * weighted_norm_squared(m, g), 1e-10 * lhs);
  }
}

TEST(Ratio, GapEigenvectorAtP2) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto w = instances::connected_walk(seed);
    const auto sp = spectrum(delta_operator(w));
    const std::size_t idx = sp.zero_multiplicity;
    EXPECT_NEAR(lp_energy_ratio(w, sp.eigenvectors[idx], 2), *sp.gap, 1e-8);
  }
}

TEST(Ratio, K2IsTwoForEveryFunctionAndExponent) {
  for (int a : {1, 3, 10}) {
    const auto w = from_conductance(instances::complete(2), {Rational(a)});
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
      EXPECT_NEAR(lp_energy_ratio(w, std::vector<double>{0.3, -1.7}, p), 2, 1e-12);
    }
  }
}

TEST(Ratio, AffineInvariance) {
  const auto w = instances::connected_walk(5);
  Rng rng(1);
  const auto f = instances::random_vector(rng, w.size());
  std::vector<double> g;
  for (double x : f) g.push_back(-3.5 * x + 11);
  for (double p : {1.0, 2.0, 3.0}) {
    const double r = lp_energy_ratio(w, f, p);
    EXPECT_NEAR(lp_energy_ratio(w, g, p), r, 1e-10 * r);
  }
}

TEST(Ratio, ConstantFunctionRejected) {
  const auto w = instances::connected_walk(2);
  EXPECT_THROW(lp_energy_ratio(w, std::vector<double>(w.size(), 4.0), 2), PreconditionError);
}

TEST(MeasuredCheck, C6Halves) {
  const auto c6 = instances::cycle(6);
  const std::vector<double> f{1, 1, 1, -1, -1, -1};
  const auto r = measured_lp_check(c6, f, 2);
  EXPECT_DOUBLE_EQ(r.lhs, 32);
  EXPECT_DOUBLE_EQ(r.pair, 12);
  EXPECT_NEAR(r.ratio, 8.0 / 3, 1e-15);
  EXPECT_GE(r.ratio, *spectral_gap(lambda_operator(c6)));
}

TEST(MeasuredCheck, LambdaGapEigenvectorAndTranslation) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto g = instances::connected_measured(seed);
    const auto sp = spectrum(lambda_operator(g));
    const auto& v = sp.eigenvectors[1];
    EXPECT_NEAR(measured_lp_check(g, v, 2).ratio, *sp.gap, 1e-8);
    std::vector<double> shifted;
    for (double x : v) shifted.push_back(x + 2.5);
    EXPECT_NEAR(measured_lp_check(g, shifted, 2).ratio, *sp.gap, 1e-8);
  }
}

TEST(Optimizer, MatchesGapAtP2) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto w = instances::connected_walk(seed, 3, 10);
    const auto est = optimal_lp_constant(w, 2);
    EXPECT_NEAR(est.estimate, *spectral_gap(delta_operator(w)), 1e-6) << "seed " << seed;
    EXPECT_NEAR(lp_energy_ratio(w, est.minimizer, 2), est.estimate, 1e-12 * est.estimate);
  }
}

TEST(Optimizer, K2EstimateIsTwo) {
  const auto w = from_conductance(instances::complete(2), {Rational(5)});
  for (double p : {1.0, 2.0, 3.0}) EXPECT_NEAR(optimal_lp_constant(w, p).estimate, 2, 1e-9);
}

TEST(Optimizer, AboveCheegerConstantBound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto w = instances::connected_walk(seed, 3, 8);
    const double c = to_double(cheeger_conductance(w).value);
    for (double p : {1.0, 1.5, 3.0, 4.0}) {
      PoincareOptions opt;
      opt.restarts = 16;
      const auto est = optimal_lp_constant(w, p, opt);
      EXPECT_GE(est.estimate, cp_formula(c, p) - 1e-9);
      EXPECT_NEAR(lp_energy_ratio(w, est.minimizer, p), est.estimate, 1e-12 * est.estimate);
    }
  }
}

TEST(Optimizer, DeterministicAcrossWorkers) {
  const auto w = instances::connected_walk(11, 6, 9);
  PoincareOptions a, b;
  a.workers = 1;
  b.workers = 5;
  a.seed = b.seed = 42;
  a.restarts = b.restarts = 12;
  const auto x = optimal_lp_constant(w, 1.5, a);
  const auto y = optimal_lp_constant(w, 1.5, b);
  EXPECT_EQ(x.estimate, y.estimate);
  EXPECT_EQ(x.best_restart, y.best_restart);
  EXPECT_EQ(x.minimizer, y.minimizer);
}

TEST(Inequality, RandomFunctionsAboveCp) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto w = instances::connected_walk(seed, 3, 10);
    const double c = to_double(cheeger_conductance(w).value);
    Rng rng(seed);
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
      for (int k = 0; k < 50; ++k) {
        const auto f = instances::random_vector(rng, w.size());
        EXPECT_GE(lp_energy_ratio(w, f, p), cp_formula(c, p));
      }
    }
  }
}

TEST(Inequality, VectorValuedP2AboveGap) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto w = instances::connected_walk(seed, 3, 10);
    const double gap = *spectral_gap(delta_operator(w));
    Rng rng(seed);
    const auto f = random_map(rng, w.size(), 1 + seed % 4);
    EXPECT_GE(lp_energy_ratio(w, f, 2), gap - 1e-9);
  }
}
