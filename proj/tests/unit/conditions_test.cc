#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "striplab/conditions.hpp"
#include "striplab/constructions.hpp"
#include "striplab/verify.hpp"
#include "test_support.hpp"

namespace striplab {
namespace {

using testing::ExpectCode;

ConditionInputs zero_coherence() {
  return {.mu = 0.0, .mu_bar_sq = 0.0, .spectral_norm_sq = 1.0, .m = 1000.0, .n = 1e6,
          .k = 10.0, .delta = 0.5, .eps = 0.01};
}

// The same three inequalities written out independently in long double.
bool witness_holds_long_double(const ConditionInputs& in, long double a, long double b,
                               long double c) {
  using std::log, std::sqrt, std::exp;
  const long double eps = in.eps;
  const long double k = in.k;
  const long double l1 = log(1.0L / eps);
  const long double mu4 = (long double)in.mu * in.mu * in.mu * in.mu;
  const long double e = exp(1.0L);
  const long double first = (1 - a) * (1 - a) * b * b / (32 * log(2 * k) * log(e / eps));
  const bool i = k * mu4 <= std::min(first, c * c) / (l1 * l1);
  const bool ii = k * (long double)in.mu_bar_sq <= a * b / l1;
  const bool iii = sqrt(a) + sqrt(2 * a * b) + sqrt(c) +
                       2 * k / (long double)in.n * (long double)in.spectral_norm_sq <=
                   exp(-0.25L) * (long double)in.delta / (6 * sqrt(2.0L));
  return i && ii && iii;
}

// Family m = 2^{4r}, N = 2^{4r²+7r} with k = ⌊m / ln³(N/ε)⌋ and ε chosen as
// the fixed point ε = 1/(2k), just inside the ε < 1/k requirement.
ConditionInputs dg_scaling(int r) {
  const double m = std::pow(2.0, 4 * r);
  const double log_n = (4.0 * r * r + 7.0 * r) * std::numbers::ln2;
  double eps = 1e-3;
  double k = 0.0;
  for (int it = 0; it < 50; ++it) {
    k = std::floor(m / std::pow(log_n - std::log(eps), 3));
    if (k < 1.0) break;
    eps = 0.5 / k;
  }
  if (k < 1.0) {
    k = 1.0;
    eps = 0.5;
  }
  const double n = std::exp(log_n);
  return {.mu = std::pow(m, -0.25), .mu_bar_sq = 1.0 / m, .spectral_norm_sq = n / m, .m = m,
          .n = n, .k = k, .delta = 0.5, .eps = eps};
}

TEST(StripCondition, ZeroCoherenceIsFeasible) {
  const ConditionInputs in = zero_coherence();
  const auto cs = theorem1_constraints(in, 0.1, 0.1, 0.1);
  EXPECT_NEAR(cs[2].rhs, 0.045891276241931976, 1e-15);
  const TheoremWitness w = check_theorem1(in);
  ASSERT_TRUE(w.feasible);
  ASSERT_TRUE(w.a && w.b && w.c);
  EXPECT_GE(w.slack, 0.0);
  // Reference optimum from a global optimizer; the grid gets within 1e-2.
  EXPECT_NEAR(w.slack, 0.95595, 1e-2);
  EXPECT_TRUE(w.never_satisfied.empty());
  EXPECT_TRUE(witness_holds_long_double(in, *w.a, *w.b, *w.c));
}

TEST(StripCondition, LargeCoherenceIsInfeasible) {
  ConditionInputs in = zero_coherence();
  in.mu = 0.5;
  in.k = 100.0;
  in.eps = 0.005;
  const TheoremWitness w = check_theorem1(in);
  EXPECT_FALSE(w.feasible);
  EXPECT_FALSE(w.a.has_value());
  ASSERT_EQ(w.never_satisfied.size(), 1u);
  EXPECT_EQ(w.never_satisfied[0], "coherence");
  EXPECT_EQ(w.binding_constraint, "coherence");
  EXPECT_LT(w.slack, 0.0);
}

TEST(StripCondition, EpsPrecondition) {
  ConditionInputs in = zero_coherence();
  in.eps = 0.1;  // 1/k
  ExpectCode(ErrorCode::kEpsOutOfRange, [&] { check_theorem1(in); });
  in.k = 1.0;
  in.eps = 0.65;  // above e^{1 - 1/ln 2} ≈ 0.6423
  ExpectCode(ErrorCode::kEpsOutOfRange, [&] { check_theorem1(in); });
  EXPECT_NEAR(theorem1_eps_limit(1.0), 0.6423030533918985, 1e-15);
  in.eps = 0.0;
  ExpectCode(ErrorCode::kEpsOutOfRange, [&] { check_theorem1(in); });
  in = zero_coherence();
  in.k = 2e6;
  ExpectCode(ErrorCode::kInvalidArgument, [&] { check_theorem1(in); });
}

TEST(StripCondition, SmallScalingInstancesAreInfeasible) {
  // r = 3 gives m = 4096 but ln³(N/ε) is already far above m, so k rounds
  // to zero; at r = 8 k is positive and the inequalities still fail.
  const ConditionInputs r3 = dg_scaling(3);
  EXPECT_EQ(r3.k, 1.0);
  EXPECT_FALSE(check_theorem1(r3).feasible);
  const ConditionInputs r8 = dg_scaling(8);
  EXPECT_EQ(r8.k, 387.0);
  EXPECT_NEAR(r8.eps, 0.0012919896640826874, 1e-18);
  EXPECT_FALSE(check_theorem1(r8).feasible);
}

TEST(StripCondition, LargeScalingInstancesAreFeasible) {
  for (auto [r, k] : {std::pair{12, 2660447.0}, std::pair{15, 3099716740.0}}) {
    const ConditionInputs in = dg_scaling(r);
    EXPECT_EQ(in.k, k) << r;
    const TheoremWitness w = check_theorem1(in);
    ASSERT_TRUE(w.feasible) << r;
    EXPECT_TRUE(witness_holds_long_double(in, *w.a, *w.b, *w.c)) << r;
  }
}

TEST(StripCondition, FeasibilityIsMonotoneInCoherenceInputs) {
  const ConditionInputs base = dg_scaling(12);
  const TheoremWitness w = check_theorem1(base);
  ASSERT_TRUE(w.feasible);
  for (int field = 0; field < 3; ++field) {
    ConditionInputs smaller = base;
    double& v = field == 0 ? smaller.mu : field == 1 ? smaller.mu_bar_sq : smaller.spectral_norm_sq;
    v *= 0.5;
    const auto cs = theorem1_constraints(smaller, *w.a, *w.b, *w.c);
    EXPECT_TRUE(cs[0].holds() && cs[1].holds() && cs[2].holds()) << field;
    EXPECT_TRUE(check_theorem1(smaller).feasible) << field;
  }
}

TEST(StripCondition, WitnessSurvivesExtendedPrecisionAcrossInputs) {
  for (double mu : {0.0, 1e-3, 5e-3}) {
    for (double nsq : {1.0, 50.0}) {
      ConditionInputs in = zero_coherence();
      in.mu = mu;
      in.mu_bar_sq = mu * mu;
      in.spectral_norm_sq = nsq;
      const TheoremWitness w = check_theorem1(in);
      if (w.feasible) EXPECT_TRUE(witness_holds_long_double(in, *w.a, *w.b, *w.c));
    }
  }
}

TEST(SincCondition, ZeroCoherenceHoldsEverywhere) {
  ConditionInputs in = zero_coherence();
  for (double beta : {0.1, 1.0, 5.0}) {
    for (double a : {0.01, 0.5, 0.99}) {
      const Theorem2Result r = check_theorem2(in, beta, a);
      EXPECT_TRUE(r.holds);
      EXPECT_DOUBLE_EQ(r.alpha, beta / std::log(2.0 * in.n / in.eps));
    }
  }
}

TEST(SincCondition, AverageCoherenceTooLargeFailsScan) {
  ConditionInputs in = zero_coherence();
  in.mu_bar_sq = 0.05;  // k μ̄² = 0.5
  const double log_term = std::log(2.0 * in.n / in.eps);
  const double beta = 0.4 * log_term;  // k μ̄² L / β = 1.25 > 1
  EXPECT_FALSE(scan_theorem2(in, beta).holds);
  EXPECT_FALSE(check_theorem2(in, beta, 0.99).holds);
  EXPECT_TRUE(scan_theorem2(in, 0.6 * log_term).holds);
}

TEST(SincCondition, ChirpThirtyOneAtAlphaPointThree) {
  const ConditionInputs in{.mu = 1.0 / std::sqrt(31.0), .mu_bar_sq = 1.0 / 32.0,
                           .spectral_norm_sq = 31.0, .m = 31.0, .n = 961.0, .k = 4.0,
                           .delta = 0.5, .eps = 0.05};
  const double beta = theorem2_beta_for_alpha(0.3, 961.0, 0.05);
  EXPECT_NEAR(beta, 3.1670561589252686, 1e-13);
  const Theorem2Result r = scan_theorem2(in, beta);
  EXPECT_FALSE(r.holds);
  EXPECT_NEAR(r.alpha, 0.3, 1e-15);
  for (double a : {0.1, 0.5, 0.9}) EXPECT_FALSE(check_theorem2(in, beta, a).holds);
}

TEST(SincCondition, WorstCaseAverageIsNeverWeaker) {
  for (double mu : {0.01, 0.03, 0.1}) {
    ConditionInputs truth{.mu = mu, .mu_bar_sq = mu * mu / 4.0, .spectral_norm_sq = 4.0,
                          .m = 500.0, .n = 2000.0, .k = 5.0, .delta = 0.5, .eps = 0.01};
    ConditionInputs worst = truth;
    worst.mu_bar_sq = mu * mu;
    for (double beta : {0.5, 2.0, 8.0}) {
      if (scan_theorem2(worst, beta).holds) EXPECT_TRUE(scan_theorem2(truth, beta).holds);
    }
  }
}

TEST(SincCondition, InvalidArguments) {
  const ConditionInputs in = zero_coherence();
  EXPECT_THROW(check_theorem2(in, 0.0, 0.5), Error);
  EXPECT_THROW(check_theorem2(in, 1.0, 1.0), Error);
}

TEST(ColumnSumCondition, BoundsAndOrder) {
  const Corollary1Result zero = check_corollary1(0.0, 0.0, 4.0, 0.1, 1.0, 0.5);
  EXPECT_TRUE(zero.holds);
  EXPECT_NEAR(zero.bound, 2.0 * std::exp(-10.0), 1e-18);
  EXPECT_NEAR(zero.bound, 9.08e-5, 1e-7);
  ExpectCode(ErrorCode::kAlphaBetaOrder, [] { check_corollary1(0.0, 0.0, 4.0, 1.5, 1.0, 0.5); });
  ExpectCode(ErrorCode::kAlphaBetaOrder,
             [] { check_corollary1(0.0, 0.0, 4.0, std::numbers::log2e, 1.0, 0.5); });
}

TEST(ColumnSumCondition, ChirpThirtyOneAndEmpiricalSide) {
  const double mu = 1.0 / std::sqrt(31.0);
  const double mu2 = 1.0 / 32.0;
  const Corollary1Result wide = scan_corollary1(mu, mu2, 4.0, 1.0, 2.0);
  ASSERT_TRUE(wide.holds);
  EXPECT_GT(wide.a, 0.125);
  EXPECT_LT(wide.a, 0.4839);
  EXPECT_NEAR(wide.bound, 0.2706705664732254, 1e-15);
  const Corollary1Result loose = scan_corollary1(mu, mu2, 4.0, 1.0, 1.0);
  EXPECT_TRUE(loose.holds);
  EXPECT_NEAR(loose.bound, 0.7357588823428847, 1e-15);
  EXPECT_FALSE(scan_corollary1(mu, mu2, 4.0, 0.3, 0.5).holds);

  // Every 4-term column sum on this frame is at most 4/31 < α = 1.
  TailQuery q;
  q.statistic = TailStatistic::kColumnSum;
  q.k = 4;
  q.threshold = 1.0;
  q.method = MonteCarlo{20000, 3};
  const TailEstimate e = estimate_tail(build_chirp(31), q);
  EXPECT_LE(e.point_estimate, wide.bound + (e.ci_high - e.ci_low));
  EXPECT_EQ(e.exceedances, 0u);
}

TEST(RequiredSincLevel, ExamplesAndMonotonicity) {
  EXPECT_NEAR(required_sinc_level(0.5, 25.0, 0.05), 0.004523900853158873, 1e-17);
  EXPECT_NEAR(required_sinc_level(0.5, 256.0, 1.0), 0.005009357780864456, 1e-17);
  EXPECT_EQ(required_sinc_level(1.0, 25.0, 0.05), 0.0);
  EXPECT_NEAR(required_sinc_level(0.0, std::numbers::e / 2.0, 1.0), 0.125, 1e-15);
  double prev = 1.0;
  for (double n : {10.0, 100.0, 1e4, 1e8}) {
    const double v = required_sinc_level(0.3, n, 0.01);
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(required_sinc_level(0.3, 100.0, 0.001), required_sinc_level(0.3, 100.0, 0.01));
  EXPECT_LT(required_sinc_level(0.6, 100.0, 0.01), required_sinc_level(0.3, 100.0, 0.01));
  EXPECT_THROW(required_sinc_level(1.5, 25.0, 0.05), Error);
  EXPECT_THROW(required_sinc_level(0.5, 0.1, 1.0), Error);
}

TEST(RegimeReport, ChirpTenOhNine) {
  const double m = 1009.0;
  const ConditionInputs in{.mu = 1.0 / std::sqrt(m), .mu_bar_sq = 1.0 / (m + 1.0),
                           .spectral_norm_sq = m, .m = m, .n = m * m, .k = 50.0,
                           .delta = 0.5, .eps = 0.01};
  const RegimeReport r = regime_report(in);
  EXPECT_TRUE(r.near_optimal);
  EXPECT_TRUE(r.coherence);
  EXPECT_TRUE(r.extended);
  EXPECT_TRUE(r.heuristic);
  ASSERT_EQ(r.clauses.size(), 7u);
  EXPECT_EQ(r.clauses[2].label, "coherence/mu");
  EXPECT_NEAR(r.clauses[2].rhs, 1.0 / std::sqrt(50.0 * std::log(50.0)), 1e-15);
}

TEST(RegimeReport, ZeroCoherenceAndNormClause) {
  ConditionInputs in = zero_coherence();
  const RegimeReport r = regime_report(in);
  for (const auto& c : r.clauses) {
    if (c.label.ends_with("/mu") || c.label.ends_with("mu-bar-sq")) EXPECT_TRUE(c.holds) << c.label;
  }
  // ‖Φ‖² = N/m with m = k/2 breaks the ‖Φ‖² <= N/k clause.
  in.spectral_norm_sq = in.n / (in.k / 2.0);
  const RegimeReport bad = regime_report(in);
  EXPECT_FALSE(bad.extended);
  EXPECT_FALSE(bad.coherence);
  // Constants are applied and reported.
  RegimeConstants c;
  c.c[3] = 2.0;
  const RegimeReport relaxed = regime_report(in, c);
  EXPECT_TRUE(relaxed.extended);
  EXPECT_EQ(relaxed.constants.c[3], 2.0);
}

TEST(RegimeReport, KEqualsOneHasNoCoherenceLimit) {
  ConditionInputs in = zero_coherence();
  in.k = 1.0;
  in.mu = 0.9;
  const RegimeReport r = regime_report(in);
  EXPECT_TRUE(std::isinf(r.clauses[2].rhs));
  EXPECT_TRUE(r.clauses[2].holds);
}

}  // namespace
}  // namespace striplab
