#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "striplab/binomial.hpp"
#include "striplab/frame.hpp"

namespace striplab {

enum class TailStatistic {
  kStripDelta,  // δ_I = ‖Φ_I^*Φ_I - Id‖₂ over uniform k-subsets; counts δ_I >= threshold
  kSincMax,     // max_{i∉I} ‖Φ_I^*φ_i‖² over uniform k-subsets; counts value > threshold
  kColumnSum,   // Σ_{l∈I} |⟨φ_l, φ_j⟩|² over uniform pairs (I, j ∉ I); counts value >= threshold
};

std::string to_string(TailStatistic statistic);
TailStatistic parse_statistic(const std::string& name);

struct Exhaustive {};

struct MonteCarlo {
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

using TailMethod = std::variant<Exhaustive, MonteCarlo>;

inline constexpr std::uint64_t kDefaultSubsetBudget = 10'000'000;

struct TailQuery {
  TailStatistic statistic = TailStatistic::kStripDelta;
  Index k = 1;
  double threshold = 0.0;
  TailMethod method = Exhaustive{};
  double ci_level = 0.99;
  std::uint64_t subset_budget = kDefaultSubsetBudget;
  int workers = 0;  // 0: STRIPLAB_THREADS or hardware concurrency
};

struct TailEstimate {
  std::uint64_t exceedances = 0;
  std::uint64_t samples = 0;
  double point_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ci_level = 0.99;
  bool exact = false;
  double hoeffding_half_width = 0.0;
};

// Exceedance probability of the queried statistic. Exhaustive mode walks all
// supports in lexicographic order and is exact; Monte Carlo mode draws trial
// t from a generator keyed by (seed, t), so the estimate does not depend on
// the worker count. Throws InvalidQuery or BudgetExceeded.
TailEstimate estimate_tail(const SensingMatrix& phi, const TailQuery& query);

// True iff the exhaustive probability lies inside the Monte Carlo
// Clopper-Pearson interval at `ci_level`.
bool mc_vs_exhaustive_check(const SensingMatrix& phi, Index k, TailStatistic statistic,
                            double threshold, std::uint64_t trials, std::uint64_t seed,
                            double ci_level = 0.99, int workers = 0);

// One atom of an empirical distribution: its value, probability mass and
// the tail P(value >= atom value).
struct ProfileAtom {
  double value = 0.0;
  double mass = 0.0;
  double tail = 0.0;
};

// Empirical distribution of a statistic. Values within 1e-9 (relative to
// max(1, |value|)) of an atom's smallest member are merged into that atom.
std::vector<ProfileAtom> statistic_profile(const SensingMatrix& phi, TailStatistic statistic,
                                           Index k, const TailMethod& method,
                                           std::uint64_t subset_budget = kDefaultSubsetBudget,
                                           int workers = 0);

std::vector<ProfileAtom> strip_profile(const SensingMatrix& phi, Index k,
                                       const TailMethod& method,
                                       std::uint64_t subset_budget = kDefaultSubsetBudget,
                                       int workers = 0);

// Threshold comparison used by the counters. Values within 1e-12 (relative
// to max(1, threshold)) of the threshold count as equal to it.
bool counts_as_exceedance(TailStatistic statistic, double value, double threshold);

// Calls visit(support) for every k-subset of [0, n) in lexicographic order.
// Stops early if visit returns false.
template <typename Visitor>
void for_each_subset(Index n, Index k, Visitor&& visit) {
  if (k < 0 || k > n) return;
  std::vector<Index> support(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) support[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!visit(static_cast<const std::vector<Index>&>(support))) return;
    Index i = k - 1;
    while (i >= 0 && support[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++support[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) {
      support[static_cast<std::size_t>(j)] = support[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
}

}  // namespace striplab
