#include <gtest/gtest.h>

#include <random>

#include "gamelab/regularizers.hpp"
#include "oracles.hpp"

using namespace gamelab;

namespace {
const Regularizer kEuclid{RegularizerKind::euclidean};
const Regularizer kEntropy{RegularizerKind::negative_entropy};

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }
}  // namespace

TEST(Bregman, EuclideanExamples) {
  EXPECT_DOUBLE_EQ(kEuclid.bregman(v2(0.3, 0.7), v2(0.3, 0.7)), 0.0);
  EXPECT_DOUBLE_EQ(kEuclid.bregman(v2(1, 0), v2(0, 1)), 1.0);
}

TEST(Bregman, EntropyIsKl) {
  const Vec x = v2(0.5, 0.5), y = v2(0.25, 0.75);
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  EXPECT_NEAR(kEntropy.bregman(x, y), expected, 1e-15);
  EXPECT_NEAR(expected, 0.14384, 1e-5);

  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 50; ++rep) {
    const Vec p = oracle::random_simplex_point(rng, 4), q = oracle::random_simplex_point(rng, 4);
    EXPECT_NEAR(kEntropy.bregman(p, q), oracle::kl(p, q), 1e-13);
  }
}

TEST(Bregman, EntropyRejectsUnsupportedTarget) {
  EXPECT_THROW(kEntropy.bregman(v2(0.5, 0.5), v2(1.0, 0.0)), DomainError);
  EXPECT_NO_THROW(kEntropy.bregman(v2(1.0, 0.0), v2(0.5, 0.5)));
  EXPECT_THROW(kEuclid.bregman(v2(0.5, 0.5), v3(0.2, 0.3, 0.5)), DimensionError);
}

TEST(Bregman, ThreePointIdentity) {
  std::mt19937_64 rng(8);
  for (const auto* reg : {&kEuclid, &kEntropy}) {
    for (int rep = 0; rep < 50; ++rep) {
      const Vec x = oracle::random_simplex_point(rng, 5), y = oracle::random_simplex_point(rng, 5),
                z = oracle::random_simplex_point(rng, 5);
      const double lhs = reg->bregman(x, z);
      const double rhs =
          reg->bregman(x, y) + reg->bregman(y, z) + (reg->gradient(y) - reg->gradient(z)).dot(x - y);
      EXPECT_NEAR(lhs, rhs, 1e-12);
    }
  }
}

TEST(Bregman, StrongConvexityInDeclaredNorm) {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    const Vec x = oracle::random_simplex_point(rng, 4), y = oracle::random_simplex_point(rng, 4);
    EXPECT_GE(kEuclid.bregman(x, y), 0.5 * (x - y).squaredNorm() - 1e-15);
    // Pinsker
    EXPECT_GE(kEntropy.bregman(x, y), 0.5 * std::pow((x - y).lpNorm<1>(), 2) - 1e-15);
  }
  EXPECT_EQ(kEuclid.norm_pair(), NormPair::l2_l2);
  EXPECT_EQ(kEntropy.norm_pair(), NormPair::l1_linf);
}

TEST(Prox, ZeroDirectionReturnsAnchor) {
  const Vec anchor = v3(0.2, 0.3, 0.5);
  EXPECT_TRUE(kEuclid.prox(anchor, Vec::Zero(3), 0.7).isApprox(anchor, 1e-15));
  EXPECT_TRUE(kEntropy.prox(anchor, Vec::Zero(3), 0.7).isApprox(anchor, 1e-15));
}

TEST(Prox, EuclideanBoundaryForced) {
  const Vec x = kEuclid.prox(v2(0.5, 0.5), v2(1.5, -0.5), 1.0);
  EXPECT_NEAR(x(0), 1.0, 1e-15);
  EXPECT_NEAR(x(1), 0.0, 1e-15);
}

TEST(Prox, EntropyClosedForm) {
  const Vec x = kEntropy.prox(v2(0.5, 0.5), v2(std::log(2.0), 0.0), 1.0);
  EXPECT_NEAR(x(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(x(1), 1.0 / 3.0, 1e-15);
}

TEST(Prox, IsTheMaximizerOnAGrid) {
  // On the 2-simplex the objective <g,x> - D(x,anchor)/eta can be scanned directly.
  std::mt19937_64 rng(12);
  std::normal_distribution<double> N(0.0, 1.0);
  for (const auto* reg : {&kEuclid, &kEntropy}) {
    for (int rep = 0; rep < 10; ++rep) {
      const Vec anchor = oracle::random_simplex_point(rng, 2);
      const Vec g = v2(N(rng), N(rng));
      const double eta = 0.5;
      auto obj = [&](const Vec& x) { return g.dot(x) - reg->bregman(x, anchor) / eta; };
      const Vec x = reg->prox(anchor, g, eta);
      double best = -1e300;
      for (int s = 0; s <= 20000; ++s) best = std::max(best, obj(v2(s / 20000.0, 1 - s / 20000.0)));
      EXPECT_GE(obj(x), best - 1e-8);
    }
  }
}

TEST(Prox, RejectsNonPositiveStep) {
  EXPECT_THROW(kEuclid.prox(v2(0.5, 0.5), v2(1, 0), 0.0), DomainError);
  EXPECT_THROW(kEntropy.leader(v2(1, 0), -1.0), DomainError);
}

TEST(Leader, EntropySoftmax) {
  const Vec x = kEntropy.leader(v2(std::log(3.0), 0.0), 1.0);
  EXPECT_NEAR(x(0), 0.75, 1e-15);
  EXPECT_NEAR(x(1), 0.25, 1e-15);
  const Vec big = kEntropy.leader(v2(1e6, 0.0), 1.0);
  EXPECT_TRUE(big.allFinite());
  EXPECT_NEAR(big(0), 1.0, 1e-15);
}

TEST(Leader, ZeroSumIsUniform) {
  EXPECT_TRUE(kEuclid.leader(Vec::Zero(4), 1.0).isApprox(uniform_point(4)));
  EXPECT_TRUE(kEntropy.leader(Vec::Zero(4), 1.0).isApprox(uniform_point(4)));
}

TEST(ProjectSimplex, HandExample) {
  const Vec x = project_simplex(v3(1.2, 0.3, -0.5));
  EXPECT_NEAR(x(0), 0.95, 1e-15);
  EXPECT_NEAR(x(1), 0.05, 1e-15);
  EXPECT_NEAR(x(2), 0.0, 1e-15);
}

TEST(ProjectSimplex, MatchesKktOnRandomVectors) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> N(0.0, 2.0);
  std::uniform_int_distribution<int> D(1, 12);
  for (int rep = 0; rep < 1000; ++rep) {
    Vec v(D(rng));
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = N(rng);
    const Vec x = project_simplex(v);
    EXPECT_TRUE(oracle::satisfies_projection_kkt(v, x, 1e-10));
    EXPECT_LE((x - oracle::simplex_projection_bisect(v)).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(ProjectSimplex, PointsOnTheSimplexAreFixed) {
  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 20; ++rep) {
    const Vec p = oracle::random_simplex_point(rng, 6);
    EXPECT_TRUE(project_simplex(p).isApprox(p, 1e-14));
  }
}

TEST(ProjectSimplex, RejectsNonFinite) {
  EXPECT_THROW(project_simplex(v2(std::nan(""), 1.0)), DomainError);
  EXPECT_THROW(project_simplex(Vec()), DimensionError);
}

TEST(Range, KnownValues) {
  EXPECT_DOUBLE_EQ(kEntropy.range(3), std::log(3.0));
  EXPECT_DOUBLE_EQ(kEuclid.range(3), 1.0 / 3.0);
  // sup over vertices of D(e_1, uniform)
  EXPECT_NEAR(kEntropy.bregman(Vec::Unit(3, 0), uniform_point(3)), kEntropy.range(3), 1e-15);
  EXPECT_NEAR(kEuclid.bregman(Vec::Unit(3, 0), uniform_point(3)), kEuclid.range(3), 1e-15);
}
