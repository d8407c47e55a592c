#include "bbjsr/scenario.h"

#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "bbjsr/errors.h"
#include "bbjsr/rng.h"
#include "bbjsr/specfun.h"
#include "bbjsr/whitebox.h"
#include "oracles.h"

namespace bbjsr {
namespace {

constexpr double kAlpha = 1e-3;

SampleSet sample_of(const Eigen::MatrixXd& a, std::size_t n_traces,
                    std::uint64_t seed, std::size_t l = 1) {
  Rng rng(seed);
  return strip_hidden(generate_sample(SwitchedSystem({a}), n_traces, l, rng));
}

BoundsConfig with_m(std::size_t m) {
  BoundsConfig c;
  c.m_claimed = m;
  return c;
}

SwitchedSystem stable_pair() {
  Eigen::Matrix2d a;
  a << 0.6, 0.5, -0.2, 0.4;
  Eigen::Matrix2d b;
  b << 0.3, -0.1, 0.6, 0.5;
  return SwitchedSystem({a, b});
}

// gamma_star -----------------------------------------------------------

TEST(GammaStar, DiagonalWithE1Observation) {
  const Eigen::Matrix2d a = Eigen::Vector2d(0.9, 0.3).asDiagonal();
  SampleSet s = sample_of(a, 50, 1);
  s.traces[0].x0 = Eigen::Vector2d(1.0, 0.0);
  s.traces[0].states[0] = a * s.traces[0].x0;
  const GammaStarResult g = gamma_star(s, with_m(1));
  EXPECT_NEAR(g.gamma, 0.9, kAlpha);
  EXPECT_LE(g.gamma - g.gamma_lo, kAlpha);
}

TEST(GammaStar, AntipodalMap) {
  const GammaStarResult g =
      gamma_star(sample_of(-Eigen::MatrixXd::Identity(3, 3), 20, 2), with_m(1));
  EXPECT_NEAR(g.gamma, 1.0, kAlpha);
}

TEST(GammaStar, ZeroMatrix) {
  const GammaStarResult g =
      gamma_star(sample_of(Eigen::MatrixXd::Zero(2, 2), 10, 3), with_m(1));
  EXPECT_LE(g.gamma, kAlpha);
}

TEST(GammaStar, EndpointsBracketFeasibility) {
  Rng rng(4);
  const SampleSet s = strip_hidden(generate_sample(stable_pair(), 60, 1, rng));
  const BoundsConfig cfg = with_m(2);
  const GammaStarResult g = gamma_star(s, cfg);
  EXPECT_TRUE(feasibility(2, sample_constraints(s, g.gamma), {}).feasible());
  EXPECT_FALSE(
      feasibility(2, sample_constraints(s, g.gamma - kAlpha), {}).feasible());
}

TEST(GammaStar, MonotoneInNestedSamples) {
  Rng rng(5);
  const SampleSet big = strip_hidden(generate_sample(stable_pair(), 400, 1, rng));
  double prev = 0.0;
  for (std::size_t n : {10u, 40u, 100u, 400u}) {
    SampleSet part = big;
    part.traces.resize(n);
    const double g = gamma_star(part, with_m(2)).gamma;
    EXPECT_GE(g, prev - kAlpha);
    prev = g;
  }
}

TEST(GammaStar, BracketHintIsUsedOnlyWhenFeasible) {
  const SampleSet s = sample_of(0.5 * Eigen::MatrixXd::Identity(2, 2), 20, 6);
  BoundsConfig cfg = with_m(1);
  cfg.bracket_hint = 10.0;
  EXPECT_NEAR(gamma_star(s, cfg).gamma, 0.5, kAlpha);
  cfg.bracket_hint = 0.1;
  EXPECT_NEAR(gamma_star(s, cfg).gamma, 0.5, kAlpha);
}

TEST(GammaStar, RejectsEmptySample) {
  SampleSet s;
  EXPECT_THROW(gamma_star(s, with_m(1)), ValidationError);
}

// solve_opt ------------------------------------------------------------

TEST(SolveOpt, IdentitySatisfiesGivesIdentity) {
  const SampleSet s = sample_of(0.5 * Eigen::MatrixXd::Identity(2, 2), 30, 7);
  const OptResult r = solve_opt(s, 0.5, with_m(1));
  EXPECT_NEAR(lambda_max(r.p), 1.0, 1e-4);
  EXPECT_FALSE(r.retried);
}

TEST(SolveOpt, WitnessSatisfiesSampledConstraints) {
  Rng rng(8);
  const SampleSet s = strip_hidden(generate_sample(stable_pair(), 80, 1, rng));
  const BoundsConfig cfg = with_m(2);
  const GammaStarResult g = gamma_star(s, cfg);
  const OptResult r = solve_opt(s, g.gamma, cfg);
  EXPECT_GE(lambda_min(r.p), 1.0 - 1e-6);
  for (const auto& q : sample_constraints(s, r.level)) {
    EXPECT_GE(oracle::quad_slack(q, r.p.matrix()), -1e-6);
  }
}

TEST(SolveOpt, RetriesOnceThenThrows) {
  const Eigen::Matrix2d a = Eigen::Vector2d(0.9, 0.3).asDiagonal();
  SampleSet s = sample_of(a, 20, 9);
  s.traces[0].x0 = Eigen::Vector2d(1.0, 0.0);
  s.traces[0].states[0] = a * s.traces[0].x0;
  // 0.9 (1 - alpha / 2) is infeasible, and so is the one retry level.
  EXPECT_THROW(solve_opt(s, 0.9 * (1.0 - 3.0 * kAlpha), with_m(1)),
               std::runtime_error);
  const OptResult r = solve_opt(s, 0.9 * (1.0 - 0.5 * kAlpha), with_m(1));
  EXPECT_TRUE(r.retried);
}

TEST(SolveOpt, RejectsEmptySample) {
  EXPECT_THROW(solve_opt(SampleSet{}, 1.0, with_m(1)), ValidationError);
}

// epsilon_of_beta ------------------------------------------------------

TEST(EpsilonOfBeta, ClosedFormD0) {
  const double beta = 1.0 - std::pow(0.9, 10);
  EXPECT_NEAR(epsilon_of_beta(beta, 10, 0), 0.1, 1e-10);
}

TEST(EpsilonOfBeta, ZeroConfidence) { EXPECT_EQ(epsilon_of_beta(0.0, 50, 3), 0.0); }

TEST(EpsilonOfBeta, MatchesBinomialRoot) {
  EXPECT_NEAR(epsilon_of_beta(0.95, 100, 10),
              oracle::binomial_tail_root(0.95, 100, 10), 1e-8);
}

TEST(EpsilonOfBeta, RoundTripAndMonotone) {
  const std::size_t d = 6;
  for (std::size_t n : {20u, 100u, 1000u}) {
    double prev = 0.0;
    for (double beta : {0.1, 0.5, 0.9, 0.95, 0.99}) {
      const double eps = epsilon_of_beta(beta, n, d);
      EXPECT_NEAR(scenario_confidence(eps, n, d), beta, 1e-8);
      EXPECT_GT(eps, prev);
      prev = eps;
    }
  }
  double prev = 1.0;
  for (std::size_t n = 20; n <= 20 * 1024; n *= 2) {
    const double eps = epsilon_of_beta(0.95, n, 3);
    EXPECT_LT(eps, prev);
    prev = eps;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(EpsilonOfBeta, Errors) {
  EXPECT_THROW(epsilon_of_beta(0.95, 3, 3), SampleTooSmall);
  EXPECT_THROW(epsilon_of_beta(1.0, 30, 3), DomainError);
  EXPECT_THROW(epsilon_of_beta(-0.1, 30, 3), DomainError);
}

// violation_on_sphere, kappa ---------------------------------------------

TEST(ViolationOnSphere, Examples) {
  EXPECT_NEAR(violation_on_sphere(0.001, 2, 3), 0.008, 1e-15);
  EXPECT_EQ(violation_on_sphere(0.2, 2, 3), 1.0);
  EXPECT_NEAR(violation_on_sphere(0.001, 0, 2, 0.2), 0.025, 1e-15);
  EXPECT_THROW(violation_on_sphere(0.1, 2, 1, 0.0), DomainError);
  EXPECT_THROW(violation_on_sphere(0.1, 2, 1, -0.5), DomainError);
}

TEST(Kappa, Examples) {
  EXPECT_NEAR(kappa(SymMatrix::identity(3)), 1.0, 1e-15);
  const SymMatrix p(Eigen::Vector2d(1.0, 4.0).asDiagonal().toDenseMatrix());
  EXPECT_NEAR(kappa(p), 2.0, 1e-14);
  EXPECT_NEAR(kappa(SymMatrix(5.0 * p.matrix())), 2.0, 1e-13);
  EXPECT_THROW(kappa(SymMatrix(Eigen::Matrix2d::Zero())), NotPositiveDefinite);
}

TEST(KappaAltViolation, Examples) {
  EXPECT_NEAR(kappa_alt_violation(0.3, SymMatrix::identity(2)), 0.3, 1e-15);
  const SymMatrix p(Eigen::Vector2d(1.0, 4.0).asDiagonal().toDenseMatrix());
  EXPECT_EQ(kappa_alt_violation(1.0, p), 1.0);
  EXPECT_NEAR(kappa_alt_violation(0.1, p), 0.55, 1e-14);
}

// delta_shrink, caps ----------------------------------------------------

TEST(DeltaShrink, Examples) {
  EXPECT_EQ(delta_shrink(0.0, 4), 1.0);
  EXPECT_NEAR(delta_shrink(0.125, 2), std::cos(std::numbers::pi * 0.125), 1e-9);
  EXPECT_NEAR(delta_shrink(0.1, 3), 0.8, 1e-9);
  EXPECT_EQ(delta_shrink(0.5, 3), 0.0);
  EXPECT_EQ(delta_shrink(7.0, 3), 0.0);
  EXPECT_THROW(delta_shrink(0.1, 1), DomainError);
  EXPECT_THROW(delta_shrink(-0.1, 2), DomainError);
}

TEST(DeltaShrink, NonincreasingAndInverseOfCapMeasure) {
  for (std::size_t n = 2; n <= 6; ++n) {
    double prev = 1.0;
    for (int i = 0; i <= 60; ++i) {
      const double x = i / 120.0;
      const double d = delta_shrink(x, n);
      EXPECT_LE(d, prev + 1e-15);
      EXPECT_GE(d, 0.0);
      prev = d;
      if (x > 0.0 && x < 0.5) EXPECT_NEAR(cap_measure(n, d), x, 1e-10);
    }
  }
}

TEST(CapShrink, Examples) {
  EXPECT_EQ(cap_shrink({Eigen::Vector2d(1.0, 0.0), 0.5}), 0.5);
  EXPECT_EQ(cap_shrink({Eigen::Vector2d(2.0, 0.0), 1.0}), 0.5);
  EXPECT_EQ(cap_shrink({Eigen::Vector2d(1.0, 1.0), 3.0}), 1.0);
  EXPECT_THROW(cap_shrink({Eigen::Vector2d::Zero(), 0.1}), DomainError);
}

TEST(CapMeasure, Examples) {
  for (std::size_t n = 2; n <= 6; ++n) EXPECT_NEAR(cap_measure(n, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(cap_measure(3, 0.5), 0.25, 1e-14);
  EXPECT_NEAR(cap_measure(2, std::sqrt(2.0) / 2.0), 0.25, 1e-14);
  EXPECT_EQ(cap_measure(4, 1.0), 0.0);
  EXPECT_THROW(cap_measure(1, 0.5), DomainError);
  EXPECT_THROW(cap_measure(3, 1.5), DomainError);
}

TEST(CapMeasure, MatchesClosedFormsOnS1AndS2) {
  for (int i = 0; i <= 100; ++i) {
    const double d = i / 100.0;
    EXPECT_NEAR(cap_measure(2, d), std::acos(d) / std::numbers::pi, 1e-12);
    EXPECT_NEAR(cap_measure(3, d), (1.0 - d) / 2.0, 1e-12);
  }
}

TEST(CapMeasure, MonteCarloAgreement) {
  Rng rng(31);
  for (std::size_t n : {2u, 3u, 4u}) {
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd c(n);
      for (std::size_t k = 0; k < n; ++k) c[k] = rng.normal();
      const double k = (2.0 * rng.uniform() - 1.0) * c.norm();
      const CapSpec cap{c, k};
      const oracle::MonteCarlo mc =
          oracle::cap_frequency(c, k, 100000, 1000 + n * 10 + i);
      EXPECT_NEAR(cap_measure(cap), mc.mean, 3.0 * mc.stderr_)
          << "n=" << n << " k/|c|=" << k / c.norm();
    }
  }
}

// analyze ---------------------------------------------------------------

TEST(Analyze, HalfIdentityPipeline) {
  const SampleSet s = sample_of(0.5 * Eigen::MatrixXd::Identity(2, 2), 1000, 10);
  const BoundsReport r = analyze(s, with_m(1));
  EXPECT_NEAR(r.gamma_star, 0.5, kAlpha);
  EXPECT_NEAR(lambda_max(r.p), 1.0, 1e-4);
  EXPECT_NEAR(r.kappa, 1.0, 1e-4);
  const double eps = oracle::binomial_tail_root(0.95, 1000, 3);
  EXPECT_NEAR(r.epsilon, eps, 1e-8);
  // n = 2: delta = sqrt(1 - I^{-1}(eps; 1/2, 1/2)) = cos(pi eps / 2).
  const double delta = std::cos(std::numbers::pi * eps / 2.0);
  EXPECT_NEAR(r.delta, delta, 1e-6);
  EXPECT_NEAR(r.upper, r.level / delta, 1e-6);
  EXPECT_LT(r.upper_best, 1.0);
  EXPECT_EQ(r.verdict(), "stable");
  EXPECT_EQ(r.status(), "ok");
}

TEST(Analyze, DoubleIdentityIsCertifiedUnstable) {
  const BoundsReport r =
      analyze(sample_of(2.0 * Eigen::MatrixXd::Identity(2, 2), 20, 11), with_m(1));
  EXPECT_NEAR(r.gamma_star, 2.0, kAlpha);
  EXPECT_NEAR(r.lower, 2.0 / std::sqrt(2.0), 2.0 * kAlpha);
  EXPECT_GT(r.lower, 1.0);
  EXPECT_EQ(r.verdict(), "unstable");
}

TEST(Analyze, UnboundedWhenViolationTooLarge) {
  Rng rng(12);
  const SampleSet s = strip_hidden(generate_sample(stable_pair(), 8, 1, rng));
  BoundsConfig cfg = with_m(2);
  cfg.beta = 0.99;
  const BoundsReport r = analyze(s, cfg);
  EXPECT_TRUE(std::isinf(r.upper_best));
  EXPECT_TRUE(r.unbounded);
  EXPECT_EQ(r.status(), "unbounded");
  EXPECT_EQ(r.delta, 0.0);
}

TEST(Analyze, SandwichAndInvariants) {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const SwitchedSystem sys = random_system_with_bound(
        2 + trial % 2, 2, 0.5 + 0.1 * trial, 6, rng);
    const SampleSet s = strip_hidden(generate_sample(sys, 200, 1, rng));
    BoundsConfig cfg = with_m(sys.m());
    cfg.eta = 0.01 * (trial % 3);
    const BoundsReport r = analyze(s, cfg);
    EXPECT_LE(r.lower, r.gamma_star * (1.0 + r.eta));
    if (std::isfinite(r.upper_best)) {
      EXPECT_LE(r.gamma_star * (1.0 + r.eta), r.upper_best);
    }
    EXPECT_GE(r.delta, 0.0);
    EXPECT_LE(r.delta, 1.0);
    EXPECT_GE(r.kappa, 1.0);
    EXPECT_GE(r.epsilon, 0.0);
    EXPECT_LE(r.epsilon, 1.0);
    EXPECT_LE(r.upper_best, r.upper);
    EXPECT_LE(r.upper_best, r.upper_alt);
  }
}

TEST(Analyze, ScaleInvariance) {
  Rng rng(14);
  const SwitchedSystem sys = stable_pair();
  const SampleSet s = strip_hidden(generate_sample(sys, 300, 1, rng));
  const BoundsReport base = analyze(s, with_m(2));
  for (double g : {0.5, 3.0}) {
    SampleSet scaled = s;
    for (auto& t : scaled.traces) {
      for (auto& x : t.states) x *= g;
    }
    const BoundsReport r = analyze(scaled, with_m(2));
    const double tol = 2.0 * kAlpha * std::max(1.0, g);
    EXPECT_NEAR(r.gamma_star, g * base.gamma_star, tol);
    EXPECT_NEAR(r.lower, g * base.lower, tol);
    EXPECT_NEAR(r.upper_best, g * base.upper_best, 5.0 * tol * base.upper_best);
  }
}

TEST(Analyze, HiddenModesDoNotMatter) {
  Rng rng(15);
  const SampleSet s = generate_sample(stable_pair(), 100, 2, rng);
  const BoundsReport a = analyze(s, with_m(2));
  const BoundsReport b = analyze(strip_hidden(s), with_m(2));
  EXPECT_EQ(a.gamma_star, b.gamma_star);
  EXPECT_EQ(a.upper_best, b.upper_best);
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.p.matrix(), b.p.matrix());
}

TEST(Analyze, MinModeProbReplacesModeCount) {
  Rng rng(16);
  const SampleSet s = strip_hidden(generate_sample(stable_pair(), 400, 1, rng));
  BoundsConfig cfg;
  cfg.min_mode_prob = 0.25;
  const BoundsReport r = analyze(s, cfg);
  EXPECT_NEAR(r.eps_sphere, std::min(1.0, r.epsilon / 0.25), 1e-15);
  EXPECT_EQ(r.m, 0u);
}

TEST(Analyze, LongerTraces) {
  const SampleSet s = sample_of(0.5 * Eigen::MatrixXd::Identity(2, 2), 100, 17, 3);
  const BoundsReport r = analyze(s, with_m(1));
  EXPECT_NEAR(r.gamma_star, 0.5, kAlpha);
  EXPECT_NEAR(r.lower, r.gamma_lo / std::pow(2.0, 1.0 / 6.0), 1e-12);
}

TEST(Analyze, ScalarSystem) {
  const SampleSet s = sample_of(Eigen::MatrixXd::Constant(1, 1, -0.7), 50, 18);
  const BoundsReport r = analyze(s, with_m(1));
  EXPECT_NEAR(r.gamma_star, 0.7, kAlpha);
  EXPECT_EQ(r.delta, 1.0);
  EXPECT_NEAR(r.upper_best, r.level, 1e-15);
}

TEST(Analyze, Errors) {
  const SampleSet s = sample_of(Eigen::MatrixXd::Identity(2, 2), 3, 19);
  try {
    analyze(s, with_m(1));
    FAIL();
  } catch (const SampleTooSmall& e) {
    EXPECT_EQ(e.need(), 4u);
  }
  const SampleSet ok = sample_of(Eigen::MatrixXd::Identity(2, 2), 10, 19);
  EXPECT_THROW(analyze(ok, BoundsConfig{}), ValidationError);
  BoundsConfig bad = with_m(1);
  bad.l = 2;
  EXPECT_THROW(analyze(ok, bad), ValidationError);
  bad = with_m(1);
  bad.beta = 1.0;
  EXPECT_THROW(analyze(ok, bad), ValidationError);
  bad = with_m(1);
  bad.alpha = 0.0;
  EXPECT_THROW(analyze(ok, bad), ValidationError);
  bad = with_m(1);
  bad.eta = -1.0;
  EXPECT_THROW(analyze(ok, bad), ValidationError);
}

}  // namespace
}  // namespace bbjsr
