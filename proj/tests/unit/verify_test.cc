#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "striplab/constructions.hpp"
#include "striplab/frame.hpp"
#include "striplab/rng.hpp"
#include "striplab/verify.hpp"
#include "test_support.hpp"

namespace striplab {
namespace {

using testing::ExpectCode;

TailQuery exhaustive(TailStatistic stat, Index k, double threshold) {
  TailQuery q;
  q.statistic = stat;
  q.k = k;
  q.threshold = threshold;
  q.method = Exhaustive{};
  return q;
}

TailQuery monte_carlo(TailStatistic stat, Index k, double threshold, std::uint64_t trials,
                      std::uint64_t seed, int workers = 0) {
  TailQuery q = exhaustive(stat, k, threshold);
  q.method = MonteCarlo{trials, seed};
  q.workers = workers;
  return q;
}

TEST(ForEachSubset, LexicographicAndComplete) {
  std::vector<std::vector<Index>> seen;
  for_each_subset(5, 3, [&](const std::vector<Index>& s) {
    seen.push_back(s);
    return true;
  });
  ASSERT_EQ(seen.size(), 10u);
  EXPECT_EQ(seen.front(), (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(seen.back(), (std::vector<Index>{2, 3, 4}));
  EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
  int visits = 0;
  for_each_subset(10, 2, [&](const std::vector<Index>&) { return ++visits < 4; });
  EXPECT_EQ(visits, 4);
}

TEST(EstimateTail, ChirpStripExample) {
  const TailEstimate e = estimate_tail(build_chirp(5), exhaustive(TailStatistic::kStripDelta, 2, 0.3));
  EXPECT_EQ(e.exceedances, 250u);
  EXPECT_EQ(e.samples, 300u);
  EXPECT_DOUBLE_EQ(e.point_estimate, 250.0 / 300.0);
  EXPECT_TRUE(e.exact);
  EXPECT_EQ(e.ci_low, e.point_estimate);
  EXPECT_EQ(e.ci_high, e.point_estimate);
}

TEST(EstimateTail, IdentityIsZeroForEveryK) {
  const SensingMatrix id = testing::identity_frame(6);
  for (Index k = 1; k < 6; ++k) {
    EXPECT_EQ(estimate_tail(id, exhaustive(TailStatistic::kStripDelta, k, 0.1)).exceedances, 0u);
  }
}

TEST(EstimateTail, ChirpSincExamples) {
  const SensingMatrix phi = build_chirp(5);
  EXPECT_EQ(estimate_tail(phi, exhaustive(TailStatistic::kSincMax, 2, 0.39)).point_estimate, 1.0);
  EXPECT_EQ(estimate_tail(phi, exhaustive(TailStatistic::kSincMax, 2, 0.41)).point_estimate, 0.0);
}

TEST(EstimateTail, ChirpColumnSumAgainstEnumeration) {
  const TailEstimate e =
      estimate_tail(build_chirp(5), exhaustive(TailStatistic::kColumnSum, 2, 0.3));
  EXPECT_EQ(e.samples, 6900u);
  EXPECT_EQ(e.exceedances, 4750u);
}

TEST(EstimateTail, TieAtThresholdFollowsComparison) {
  // Every sinc value is exactly 2/5 up to rounding: strict comparison says no
  // exceedance, the column-sum counter (>=) sees the 0.4 atom.
  const SensingMatrix phi = build_chirp(5);
  EXPECT_EQ(estimate_tail(phi, exhaustive(TailStatistic::kSincMax, 2, 0.4)).exceedances, 0u);
  const TailEstimate cs = estimate_tail(phi, exhaustive(TailStatistic::kColumnSum, 2, 0.4));
  EXPECT_NEAR(cs.point_estimate, 0.688405797101449, 1e-12);
  // Strip ties: the 1/√5 atom counts at exactly that threshold.
  EXPECT_EQ(estimate_tail(phi, exhaustive(TailStatistic::kStripDelta, 2, 1.0 / std::sqrt(5.0)))
                .exceedances,
            250u);
}

TEST(EstimateTail, ExhaustiveMonotoneInThreshold) {
  const SensingMatrix phi = build_gaussian(6, 12, 5);
  for (TailStatistic stat :
       {TailStatistic::kStripDelta, TailStatistic::kSincMax, TailStatistic::kColumnSum}) {
    double previous = 1.0;
    for (double t = 0.0; t <= 1.5; t += 0.05) {
      const double p = estimate_tail(phi, exhaustive(stat, 3, t)).point_estimate;
      EXPECT_LE(p, previous) << to_string(stat) << " " << t;
      previous = p;
    }
  }
}

TEST(EstimateTail, InvalidQueriesAndBudget) {
  const SensingMatrix phi = build_chirp(5);
  ExpectCode(ErrorCode::kInvalidQuery,
             [&] { estimate_tail(phi, exhaustive(TailStatistic::kStripDelta, 0, 0.3)); });
  ExpectCode(ErrorCode::kInvalidQuery,
             [&] { estimate_tail(phi, exhaustive(TailStatistic::kStripDelta, 25, 0.3)); });
  ExpectCode(ErrorCode::kInvalidQuery,
             [&] { estimate_tail(phi, exhaustive(TailStatistic::kStripDelta, 2, -0.1)); });
  ExpectCode(ErrorCode::kInvalidQuery,
             [&] { estimate_tail(phi, monte_carlo(TailStatistic::kStripDelta, 2, 0.3, 0, 1)); });
  TailQuery bad_ci = exhaustive(TailStatistic::kStripDelta, 2, 0.3);
  bad_ci.ci_level = 1.0;
  ExpectCode(ErrorCode::kInvalidQuery, [&] { estimate_tail(phi, bad_ci); });
  TailQuery small = exhaustive(TailStatistic::kStripDelta, 2, 0.3);
  small.subset_budget = 299;
  ExpectCode(ErrorCode::kBudgetExceeded, [&] { estimate_tail(phi, small); });
  small.subset_budget = 300;
  EXPECT_NO_THROW(estimate_tail(phi, small));
  TailQuery pairs = exhaustive(TailStatistic::kColumnSum, 2, 0.3);
  pairs.subset_budget = 6899;
  ExpectCode(ErrorCode::kBudgetExceeded, [&] { estimate_tail(phi, pairs); });
}

TEST(EstimateTail, MonteCarloIntervalAndInvariants) {
  const TailEstimate e =
      estimate_tail(build_chirp(5), monte_carlo(TailStatistic::kStripDelta, 2, 0.3, 20000, 11));
  EXPECT_FALSE(e.exact);
  EXPECT_EQ(e.samples, 20000u);
  EXPECT_DOUBLE_EQ(e.point_estimate, double(e.exceedances) / 20000.0);
  EXPECT_LE(e.ci_low, e.point_estimate);
  EXPECT_GE(e.ci_high, e.point_estimate);
  const Interval cp = clopper_pearson(e.exceedances, e.samples, 0.99);
  EXPECT_EQ(e.ci_low, cp.low);
  EXPECT_EQ(e.ci_high, cp.high);
  EXPECT_NEAR(e.hoeffding_half_width, hoeffding_half_width(20000, 0.99), 1e-15);
}

TEST(EstimateTail, MonteCarloIndependentOfWorkerCount) {
  const SensingMatrix phi = build_chirp(7);
  for (TailStatistic stat :
       {TailStatistic::kStripDelta, TailStatistic::kSincMax, TailStatistic::kColumnSum}) {
    const TailEstimate one = estimate_tail(phi, monte_carlo(stat, 3, 0.4, 5000, 3, 1));
    const TailEstimate four = estimate_tail(phi, monte_carlo(stat, 3, 0.4, 5000, 3, 4));
    const TailEstimate seven = estimate_tail(phi, monte_carlo(stat, 3, 0.4, 5000, 3, 7));
    EXPECT_EQ(one.exceedances, four.exceedances);
    EXPECT_EQ(one.exceedances, seven.exceedances);
    EXPECT_EQ(one.ci_low, seven.ci_low);
  }
}

TEST(EstimateTail, CountsMatchDirectEvaluation) {
  // N = 3100 is past the Gram cache limit, N = 14 is well inside it; both
  // paths must agree with per-support evaluation through frame primitives.
  const SensingMatrix big = build_gaussian(8, 3100, 2);
  const TailEstimate a = estimate_tail(big, monte_carlo(TailStatistic::kStripDelta, 3, 0.5, 2000, 8, 3));
  std::uint64_t direct = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) {
    CounterRng rng(8, t);
    std::array<Index, 3> s{};
    sample_prefix<Index>(rng, big.cols(), s);
    direct += counts_as_exceedance(TailStatistic::kStripDelta, restricted_gram_norm(big, s), 0.5);
  }
  EXPECT_GT(a.exceedances, 0u);
  EXPECT_EQ(a.exceedances, direct);

  const SensingMatrix g = build_gaussian(5, 14, 9);
  std::uint64_t count = 0;
  for_each_subset(14, 4, [&](const std::vector<Index>& s) {
    const double oracle = testing::eigen_delta(g.entries(), s);
    count += oracle >= 0.9 ? 1 : 0;
    return true;
  });
  EXPECT_EQ(estimate_tail(g, exhaustive(TailStatistic::kStripDelta, 4, 0.9)).exceedances, count);
}

TEST(EstimateTail, UncachedMonteCarloMatchesDirectEvaluation) {
  const SensingMatrix big = build_gaussian(6, 3050, 4);
  const TailQuery q = monte_carlo(TailStatistic::kSincMax, 2, 0.3, 300, 21, 2);
  std::uint64_t direct = 0;
  for (std::uint64_t t = 0; t < 300; ++t) {
    CounterRng rng(21, t);
    std::array<Index, 2> s{};
    sample_prefix<Index>(rng, big.cols(), s);
    direct += counts_as_exceedance(TailStatistic::kSincMax, sinc_statistic(big, s), 0.3);
  }
  EXPECT_EQ(estimate_tail(big, q).exceedances, direct);
}

TEST(EstimateTail, PairFractionEqualsCoherenceMultiset) {
  // For k = 2, δ_I is the pair coherence, so the tail is a pair count.
  for (const SensingMatrix& phi :
       {build_chirp(5), build_gaussian(4, 11, 3), build_simplex_etf(5), build_delsarte_goethals(1, 0)}) {
    const Eigen::MatrixXcd g = testing::naive_gram(phi.entries());
    for (double delta : {0.1, 0.26, 0.3, 0.5}) {
      std::uint64_t pairs = 0;
      std::uint64_t hits = 0;
      for (Index i = 0; i < phi.cols(); ++i) {
        for (Index j = i + 1; j < phi.cols(); ++j) {
          ++pairs;
          hits += std::abs(g(i, j)) >= delta - 1e-12 ? 1 : 0;
        }
      }
      const TailEstimate e = estimate_tail(phi, exhaustive(TailStatistic::kStripDelta, 2, delta));
      EXPECT_EQ(e.samples, pairs);
      EXPECT_EQ(e.exceedances, hits) << phi.info().family << " " << delta;
    }
  }
}

TEST(McVsExhaustive, Examples) {
  EXPECT_TRUE(mc_vs_exhaustive_check(build_chirp(5), 2, TailStatistic::kStripDelta, 0.3, 100000, 5));
  EXPECT_TRUE(mc_vs_exhaustive_check(testing::identity_frame(6), 3, TailStatistic::kStripDelta, 0.1,
                                     1000, 1));
  EXPECT_TRUE(mc_vs_exhaustive_check(build_chirp(7), 3, TailStatistic::kSincMax, 3.0 / 7.0 - 1e-9,
                                     100000, 2));
}

TEST(McVsExhaustive, CoverageAcrossSeeds) {
  // Truth 5/6. Each 0.99 interval misses with probability at most 0.01, so
  // fewer than 95 hits out of 100 has probability below 1e-3.
  const SensingMatrix phi = build_chirp(5);
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    covered += mc_vs_exhaustive_check(phi, 2, TailStatistic::kStripDelta, 0.3, 400, 1000 + seed, 0.99, 1);
  }
  EXPECT_GE(covered, 95);
}

TEST(StatisticProfile, StripExamples) {
  const auto chirp = strip_profile(build_chirp(5), 2, Exhaustive{});
  ASSERT_EQ(chirp.size(), 2u);
  EXPECT_NEAR(chirp[0].value, 0.0, 1e-12);
  EXPECT_NEAR(chirp[0].mass, 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(chirp[0].tail, 1.0, 1e-15);
  EXPECT_NEAR(chirp[1].value, 1.0 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(chirp[1].mass, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(chirp[1].tail, 5.0 / 6.0, 1e-15);

  const auto ortho = strip_profile(testing::orthonormal_frame(7, 3), 3, Exhaustive{});
  ASSERT_EQ(ortho.size(), 1u);
  EXPECT_NEAR(ortho[0].value, 0.0, 1e-12);

  const auto simplex = strip_profile(build_simplex_etf(4), 2, Exhaustive{});
  ASSERT_EQ(simplex.size(), 1u);
  EXPECT_NEAR(simplex[0].value, 0.25, 1e-12);
  EXPECT_EQ(simplex[0].mass, 1.0);
}

TEST(StatisticProfile, OtherStatistics) {
  const auto cs = statistic_profile(build_chirp(5), TailStatistic::kColumnSum, 2, Exhaustive{});
  ASSERT_EQ(cs.size(), 3u);
  EXPECT_NEAR(cs[0].value, 0.0, 1e-12);
  EXPECT_NEAR(cs[0].mass, 0.021739130434782608, 1e-15);
  EXPECT_NEAR(cs[1].value, 0.2, 1e-12);
  EXPECT_NEAR(cs[1].mass, 0.2898550724637681, 1e-15);
  EXPECT_NEAR(cs[2].value, 0.4, 1e-12);
  EXPECT_NEAR(cs[2].mass, 0.6884057971014492, 1e-15);

  const auto sinc7 = statistic_profile(build_chirp(7), TailStatistic::kSincMax, 3, Exhaustive{});
  ASSERT_EQ(sinc7.size(), 1u);
  EXPECT_NEAR(sinc7[0].value, 3.0 / 7.0, 1e-12);
}

TEST(StatisticProfile, TailIsMonotoneAndMassesSumToOne) {
  const auto p = strip_profile(build_gaussian(5, 12, 1), 3, MonteCarlo{3000, 4});
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    total += p[i].mass;
    if (i > 0) {
      EXPECT_LT(p[i - 1].value, p[i].value);
      EXPECT_GE(p[i - 1].tail, p[i].tail);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(ParseStatistic, Aliases) {
  EXPECT_EQ(parse_statistic("strip"), TailStatistic::kStripDelta);
  EXPECT_EQ(parse_statistic("sinc"), TailStatistic::kSincMax);
  EXPECT_EQ(parse_statistic("colsum"), TailStatistic::kColumnSum);
  EXPECT_EQ(parse_statistic(to_string(TailStatistic::kColumnSum)), TailStatistic::kColumnSum);
  EXPECT_THROW(parse_statistic("rip"), Error);
}

}  // namespace
}  // namespace striplab
