#include <gtest/gtest.h>

#include "gamelab/potential.hpp"
#include "oracles.hpp"

using namespace gamelab;

namespace {

// Identical-interest 2x2 coordination game; phi = shared payoff.
PotentialGame coordination(double hi = 1.0, double lo = 0.5) {
  std::vector<double> t{hi, 0.0, 0.0, lo};
  return make_potential_game(NormalFormGame({2, 2}, {t, t}), t);
}

Vec centered(const Vec& v) { return (v.array() - v.mean()).matrix(); }

}  // namespace

TEST(PotentialGame, ConstructionChecksTheIdentity) {
  std::vector<double> t{1.0, 0.0, 0.0, 0.5};
  auto bad = t;
  bad[1] = 0.3;
  EXPECT_THROW(make_potential_game(NormalFormGame({2, 2}, {t, t}), bad), DomainError);
  EXPECT_THROW(make_potential_game(NormalFormGame({2, 2}, {t, t}), t, {1.0, -1.0}), DomainError);
}

TEST(PotentialGame, LipschitzFormula) {
  EXPECT_DOUBLE_EQ(coordination().lipschitz(), 2.0);
  std::mt19937_64 rng(1);
  auto pg = random_weighted_potential_game(rng, {2, 3, 4});
  pg.phi_max = 0.5;
  EXPECT_DOUBLE_EQ(lipschitz_constant(pg), 2.25);
}

TEST(MixedPotential, PureProfileReadsTable) {
  std::mt19937_64 rng(2);
  const auto pg = random_weighted_potential_game(rng, {2, 3});
  for (std::size_t k = 0; k < pg.game.num_profiles(); ++k)
    EXPECT_NEAR(mixed_potential(pg, pure_to_mixed(pg.game, pg.game.profile_of(k))), pg.phi[k],
                1e-15);
}

TEST(MixedPotential, MatchesBruteForceExpectation) {
  std::mt19937_64 rng(3);
  const auto pg = random_weighted_potential_game(rng, {2, 2, 3});
  const auto x = random_interior_profile(pg.game.action_counts(), rng);
  const double ref = oracle::expectation(pg.game.action_counts(), x, [&](const std::vector<int>& a) {
    return pg.phi[pg.game.index_of(a)];
  });
  EXPECT_NEAR(mixed_potential(pg, x), ref, 1e-14);
}

TEST(MixedPotential, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const auto pg = random_weighted_potential_game(rng, {3, 2, 2});
  for (int rep = 0; rep < 5; ++rep) {
    const auto x = random_interior_profile(pg.game.action_counts(), rng);
    const auto grad = mixed_potential_gradient(pg, x);
    for (int i = 0; i < 3; ++i) {
      auto f = [&](const Vec& xi) {
        auto y = x;
        y[i] = xi;
        return mixed_potential(pg, y);
      };
      for (int k = 0; k < x[i].size(); ++k)
        EXPECT_NEAR(grad[i](k), oracle::central_difference(f, x[i], k), 1e-6);
    }
  }
}

TEST(MixedPotential, GradientIsWeightedUtilityUpToConstant) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const auto pg = random_weighted_potential_game(rng, {2, 3, 3});
    const auto x = random_interior_profile(pg.game.action_counts(), rng);
    const auto grad = mixed_potential_gradient(pg, x);
    for (int i = 0; i < 3; ++i) {
      const Vec wu = pg.weights[i] * utility_vector(pg.game, i, x);
      EXPECT_LE((centered(grad[i]) - centered(wu)).lpNorm<Eigen::Infinity>(), 1e-10);
    }
  }
  // identical interest: no constant at all
  const auto pg = coordination();
  const auto x = random_interior_profile({2, 2}, rng);
  EXPECT_TRUE(mixed_potential_gradient(pg, x)[0].isApprox(utility_vector(pg.game, 0, x), 1e-14));
}

TEST(MixedPotential, OneSidedSmoothnessOnSampledPairs) {
  std::mt19937_64 rng(6);
  const auto pg = random_weighted_potential_game(rng, {2, 3});
  const auto a = one_sided_smoothness_audit(pg, 10000, rng);
  EXPECT_GE(a.worst_upper, -1e-12);
  EXPECT_GE(a.worst_lower, -1e-12);
}

TEST(MdPotential, PureEquilibriumIsStationary) {
  const auto pg = coordination();
  PotentialRunOptions opt;
  opt.init = MixedProfile{Vec::Unit(2, 0), Vec::Unit(2, 0)};
  const Regularizer e{RegularizerKind::euclidean};
  const auto run = run_md_potential(pg, {e, e}, 50, opt);
  for (double p : run.phi) EXPECT_DOUBLE_EQ(p, 1.0);
  EXPECT_DOUBLE_EQ(run.cumulative.back(), 0.0);
  const auto c = md_rate_certificate(pg, run, 0.01);
  EXPECT_TRUE(c.found);
  EXPECT_EQ(c.iteration, 0);
}

TEST(MdPotential, PotentialIncreasesFromUniform) {
  const auto pg = coordination(1.0, 0.6);
  const Regularizer e{RegularizerKind::euclidean};
  const auto run = run_md_potential(pg, {e, e}, 200);
  EXPECT_GT(run.phi[1], run.phi[0]);
  for (std::size_t t = 1; t < run.phi.size(); ++t) EXPECT_GE(run.step_slack[t], -1e-9);
  EXPECT_NEAR(run.phi.back(), 1.0, 1e-9);
}

TEST(MdPotential, HeterogeneousRegularizersCertified) {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const auto pg = random_weighted_potential_game(rng, {3, 2, 2});
    const std::vector<Regularizer> regs{{RegularizerKind::euclidean},
                                        {RegularizerKind::negative_entropy},
                                        {RegularizerKind::euclidean}};
    const auto run = run_md_potential(pg, regs, 500);
    EXPECT_LE(run.cumulative.back(), 2 * pg.phi_max + 1e-9);
  }
}

TEST(MdPotential, SignBugIsCaught) {
  std::mt19937_64 rng(8);
  const auto pg = random_weighted_potential_game(rng, {2, 2});
  const Regularizer e{RegularizerKind::euclidean};
  PotentialRunOptions opt;
  opt.sign_bug_at = 3;
  try {
    run_md_potential(pg, {e, e}, 50, opt);
    ADD_FAILURE() << "expected a certificate violation";
  } catch (const CertificateViolation& v) {
    EXPECT_GE(v.iteration(), 3);
  }
}

TEST(MdPotential, RateCertificateWithinBudget) {
  std::mt19937_64 rng(9);
  const auto pg = random_weighted_potential_game(rng, {2, 2});
  const Regularizer e{RegularizerKind::euclidean};
  const auto run = run_md_potential(pg, {e, e}, 400);
  const auto c = md_rate_certificate(pg, run, 0.01);
  ASSERT_TRUE(c.found);
  EXPECT_LE(c.iteration, c.budget);
  ASSERT_TRUE(c.gap_bound.has_value());
  EXPECT_LE(c.measured_gap, *c.gap_bound);
}

TEST(MdPotential, RegretBoundChain) {
  std::mt19937_64 rng(10);
  const auto pg = random_weighted_potential_game(rng, {3, 3});
  const Regularizer e{RegularizerKind::euclidean};
  const auto run = run_md_potential(pg, {e, e}, 2000);
  for (int i = 0; i < 2; ++i) {
    // regret of the observed (weighted) utilities
    std::vector<Vec> f;
    for (const auto& u : run.log.u[i]) f.push_back(pg.weights[i] * u);
    const auto reg = external_regret(f, run.log.x[i]);
    for (long T = 1; T <= 2000; T *= 2) {
      const double bound = md_potential_regret_bound(pg, e.range(3), 3, run.eta, T);
      EXPECT_LE(reg.prefix[T], pg.weights[i] * bound);
    }
  }
}

TEST(ConcaveRate, LinearPotentialSlackIsNonnegative) {
  // phi depends only on player 0's action, so the mixed potential is linear
  std::vector<double> phi{0.8, 0.8, -0.4, -0.4};
  const auto pg = make_potential_game(NormalFormGame({2, 2}, {phi, {0, 0, 0, 0}}), phi);
  std::mt19937_64 rng(11);
  ASSERT_TRUE(certify_concavity(pg, 10000, rng));
  const Regularizer e{RegularizerKind::euclidean};
  const auto run = run_md_potential(pg, {e, e}, 300);
  const auto slack = concave_rate_check(pg, run, potential_maximizer(pg));
  for (std::size_t t = 1; t < slack.size(); ++t) EXPECT_GE(slack[t], -1e-8);
}

TEST(ConcaveRate, CoordinationIsNotConcave) {
  std::mt19937_64 rng(12);
  EXPECT_FALSE(certify_concavity(coordination(), 10000, rng));
}

TEST(OmwuPotential, PathBoundAndRegretConstant) {
  const auto pg = coordination(1.0, 0.7);
  const auto r = omwu_potential_run(pg, 100000);
  EXPECT_LE(r.path.back(), 2 * pg.phi_max);
  EXPECT_LE(r.path.back() * 8 * r.eta, 16 * r.eta * pg.phi_max);
  const auto reps = regret_reports(r.log);
  for (int i = 0; i < 2; ++i) EXPECT_LE(reps[i].max(), r.regret_constant[i]);
}

TEST(OmwuPotential, StationaryStart) {
  // constant potential: every profile is an equilibrium
  std::vector<double> t{0.5, 0.5, 0.5, 0.5};
  const auto pg = make_potential_game(NormalFormGame({2, 2}, {t, t}), t);
  const auto r = omwu_potential_run(pg, 100);
  EXPECT_DOUBLE_EQ(r.path.back(), 0.0);
}

TEST(NearPotential, ZeroDeltaReducesToExactCase) {
  const auto pg = coordination();
  const auto spec = make_near_potential_spec(pg.game, pg);
  EXPECT_DOUBLE_EQ(spec.delta, 0.0);
  const Regularizer e{RegularizerKind::euclidean};
  const auto r = near_potential_run(spec, {e, e}, 200);
  EXPECT_DOUBLE_EQ(r.threshold, 0.0);
  const auto exact = run_md_potential(pg, {e, e}, 200);
  for (std::size_t t = 0; t < r.phi.size(); ++t) EXPECT_NEAR(r.phi[t], exact.phi[t], 1e-15);
}

TEST(NearPotential, PerturbedEntryCertifiedAboveThreshold) {
  // steep enough at the uniform start for the first moves to clear the threshold
  std::vector<double> t{1.0, 0.0, 0.0, -1.0};
  const auto pg = make_potential_game(NormalFormGame({2, 2}, {t, t}), t);
  auto t0 = t;
  t0[1] += 0.05;
  const NormalFormGame g({2, 2}, {t0, t});
  const auto spec = make_near_potential_spec(g, pg);
  EXPECT_NEAR(spec.delta, 0.05, 1e-15);
  const Regularizer e{RegularizerKind::euclidean};
  const auto r = near_potential_run(spec, {e, e}, 500);
  EXPECT_FALSE(r.events.empty());
  for (long t1 : r.events) EXPECT_GE(r.phi[t1 + 1], r.phi[t1] - 1e-12);
}
