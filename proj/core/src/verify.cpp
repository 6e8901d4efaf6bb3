#include "striplab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>

#include "striplab/errors.hpp"
#include "striplab/parallel.hpp"
#include "striplab/rng.hpp"

namespace striplab {

namespace {

// Above this many columns the N x N caches cost more memory than they save.
constexpr Index kGramCacheLimit = 3000;

// Evaluates one statistic on supports. Holds the hollow Gram (strip-delta)
// or its squared magnitudes (the sum statistics) when N is small enough;
// read-only after construction, so workers can share it.
class StatisticEvaluator {
 public:
  StatisticEvaluator(const SensingMatrix& phi, TailStatistic statistic)
      : phi_(phi), statistic_(statistic) {
    if (phi.cols() > kGramCacheLimit) return;
    if (statistic == TailStatistic::kStripDelta) {
      gram_ = hollow_gram(phi);
    } else {
      abs2_ = hollow_gram(phi).cwiseAbs2();
    }
  }

  // Draw size for one sample: the support, plus the outside column for
  // column-sum (stored last).
  Index draw_size(Index k) const {
    return statistic_ == TailStatistic::kColumnSum ? k + 1 : k;
  }

  // `draw` holds the support, followed by j for column-sum.
  double evaluate(std::span<const Index> draw, Index k) const {
    const auto support = draw.first(static_cast<std::size_t>(k));
    switch (statistic_) {
      case TailStatistic::kStripDelta:
        return strip(support);
      case TailStatistic::kSincMax:
        return sinc(support);
      case TailStatistic::kColumnSum:
        return column_sum(support, draw[static_cast<std::size_t>(k)]);
    }
    return 0.0;
  }

 private:
  double strip(std::span<const Index> support) const {
    if (!gram_) return restricted_gram_norm(phi_, support);
    const auto k = static_cast<Index>(support.size());
    Eigen::MatrixXcd block(k, k);
    for (Index b = 0; b < k; ++b) {
      for (Index a = 0; a < k; ++a) {
        block(a, b) = (*gram_)(support[static_cast<std::size_t>(a)],
                               support[static_cast<std::size_t>(b)]);
      }
    }
    return hollow_block_norm(block);
  }

  double sinc(std::span<const Index> support) const {
    if (!abs2_) return sinc_statistic(phi_, support);
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(phi_.cols());
    for (const Index l : support) sums += abs2_->col(l);
    for (const Index l : support) sums(l) = -1.0;
    return std::max(0.0, sums.maxCoeff());
  }

  double column_sum(std::span<const Index> support, Index j) const {
    if (!abs2_) return column_sum_statistic(phi_, support, j);
    double total = 0.0;
    for (const Index l : support) total += (*abs2_)(l, j);
    return total;
  }

  const SensingMatrix& phi_;
  TailStatistic statistic_;
  std::optional<Eigen::MatrixXcd> gram_;
  std::optional<Eigen::MatrixXd> abs2_;
};

void validate_query(const SensingMatrix& phi, const TailQuery& q) {
  if (q.k < 1 || q.k >= phi.cols()) {
    throw Error(ErrorCode::kInvalidQuery,
                "k must satisfy 1 <= k < N (k=" + std::to_string(q.k) +
                    ", N=" + std::to_string(phi.cols()) + ")");
  }
  if (!std::isfinite(q.threshold) || q.threshold < 0.0) {
    throw Error(ErrorCode::kInvalidQuery, "threshold must be finite and >= 0");
  }
  if (!(q.ci_level > 0.0 && q.ci_level < 1.0)) {
    throw Error(ErrorCode::kInvalidQuery, "ci-level must lie in (0, 1)");
  }
  if (const auto* mc = std::get_if<MonteCarlo>(&q.method); mc && mc->trials < 1) {
    throw Error(ErrorCode::kInvalidQuery, "Monte Carlo needs at least one trial");
  }
}

std::uint64_t exhaustive_size(const SensingMatrix& phi, TailStatistic statistic, Index k,
                              std::uint64_t budget) {
  const auto n = static_cast<std::uint64_t>(phi.cols());
  double size = binomial_coefficient(n, static_cast<std::uint64_t>(k));
  if (statistic == TailStatistic::kColumnSum) size *= static_cast<double>(n - k);
  if (!(size <= static_cast<double>(budget))) {
    throw Error(ErrorCode::kBudgetExceeded,
                "exhaustive enumeration needs " + std::to_string(size) +
                    " evaluations, budget is " + std::to_string(budget));
  }
  return static_cast<std::uint64_t>(std::llround(size));
}

// Visits every (draw, value) of an exhaustive enumeration in lexicographic
// order: supports first, then j ascending over the complement.
template <typename Sink>
void enumerate_values(const SensingMatrix& phi, const StatisticEvaluator& eval,
                      TailStatistic statistic, Index k, Sink&& sink) {
  const Index n = phi.cols();
  std::vector<Index> draw(static_cast<std::size_t>(eval.draw_size(k)));
  for_each_subset(n, k, [&](const std::vector<Index>& support) {
    std::copy(support.begin(), support.end(), draw.begin());
    if (statistic != TailStatistic::kColumnSum) {
      sink(eval.evaluate(draw, k));
      return true;
    }
    std::size_t next = 0;
    for (Index j = 0; j < n; ++j) {
      if (next < support.size() && support[next] == j) {
        ++next;
        continue;
      }
      draw.back() = j;
      sink(eval.evaluate(draw, k));
    }
    return true;
  });
}

// Runs `trials` Monte Carlo draws; trial t's draw depends only on (seed, t).
// sink(t, value) is called from worker threads with disjoint t.
template <typename Sink>
void sample_values(const SensingMatrix& phi, const StatisticEvaluator& eval, Index k,
                   const MonteCarlo& mc, int workers, Sink&& sink) {
  const Index n = phi.cols();
  const Index draw_size = eval.draw_size(k);
  parallel_ranges(mc.trials, resolve_workers(workers),
                  [&](std::uint64_t begin, std::uint64_t end, int) {
                    std::vector<Index> draw(static_cast<std::size_t>(draw_size));
                    for (std::uint64_t t = begin; t < end; ++t) {
                      CounterRng rng(mc.seed, t);
                      sample_prefix<Index>(rng, n, draw);
                      sink(t, eval.evaluate(draw, k));
                    }
                  });
}

}  // namespace

std::string to_string(TailStatistic statistic) {
  switch (statistic) {
    case TailStatistic::kStripDelta: return "strip-delta";
    case TailStatistic::kSincMax: return "sinc-max";
    case TailStatistic::kColumnSum: return "column-sum";
  }
  return "unknown";
}

TailStatistic parse_statistic(const std::string& name) {
  if (name == "strip-delta" || name == "strip") return TailStatistic::kStripDelta;
  if (name == "sinc-max" || name == "sinc") return TailStatistic::kSincMax;
  if (name == "column-sum" || name == "colsum") return TailStatistic::kColumnSum;
  throw Error(ErrorCode::kInvalidQuery, "unknown statistic '" + name + "'");
}

bool counts_as_exceedance(TailStatistic statistic, double value, double threshold) {
  const double slack = 1e-12 * std::max(1.0, threshold);
  if (statistic == TailStatistic::kSincMax) return value > threshold + slack;
  return value >= threshold - slack;
}

TailEstimate estimate_tail(const SensingMatrix& phi, const TailQuery& query) {
  validate_query(phi, query);
  TailEstimate out;
  out.ci_level = query.ci_level;

  if (std::holds_alternative<Exhaustive>(query.method)) {
    out.samples = exhaustive_size(phi, query.statistic, query.k, query.subset_budget);
    const StatisticEvaluator eval(phi, query.statistic);
    std::uint64_t hits = 0;
    enumerate_values(phi, eval, query.statistic, query.k, [&](double value) {
      if (counts_as_exceedance(query.statistic, value, query.threshold)) ++hits;
    });
    out.exceedances = hits;
    out.point_estimate = static_cast<double>(hits) / static_cast<double>(out.samples);
    out.ci_low = out.ci_high = out.point_estimate;
    out.exact = true;
    out.hoeffding_half_width = 0.0;
    return out;
  }

  const auto& mc = std::get<MonteCarlo>(query.method);
  const StatisticEvaluator eval(phi, query.statistic);
  const int workers = resolve_workers(query.workers);
  std::vector<std::uint64_t> per_worker(static_cast<std::size_t>(workers), 0);
  const Index n = phi.cols();
  const Index draw_size = eval.draw_size(query.k);
  parallel_ranges(mc.trials, workers, [&](std::uint64_t begin, std::uint64_t end, int w) {
    std::vector<Index> draw(static_cast<std::size_t>(draw_size));
    std::uint64_t hits = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
      CounterRng rng(mc.seed, t);
      sample_prefix<Index>(rng, n, draw);
      if (counts_as_exceedance(query.statistic, eval.evaluate(draw, query.k),
                               query.threshold)) {
        ++hits;
      }
    }
    per_worker[static_cast<std::size_t>(w)] = hits;
  });
  for (const auto h : per_worker) out.exceedances += h;
  out.samples = mc.trials;
  out.point_estimate = static_cast<double>(out.exceedances) / static_cast<double>(out.samples);
  const Interval ci = clopper_pearson(out.exceedances, out.samples, query.ci_level);
  out.ci_low = std::min(ci.low, out.point_estimate);
  out.ci_high = std::max(ci.high, out.point_estimate);
  out.exact = false;
  out.hoeffding_half_width = hoeffding_half_width(out.samples, query.ci_level);
  return out;
}

bool mc_vs_exhaustive_check(const SensingMatrix& phi, Index k, TailStatistic statistic,
                            double threshold, std::uint64_t trials, std::uint64_t seed,
                            double ci_level, int workers) {
  TailQuery q;
  q.statistic = statistic;
  q.k = k;
  q.threshold = threshold;
  q.ci_level = ci_level;
  q.workers = workers;
  q.method = Exhaustive{};
  const TailEstimate exact = estimate_tail(phi, q);
  q.method = MonteCarlo{trials, seed};
  const TailEstimate sampled = estimate_tail(phi, q);
  return sampled.ci_low <= exact.point_estimate && exact.point_estimate <= sampled.ci_high;
}

std::vector<ProfileAtom> statistic_profile(const SensingMatrix& phi, TailStatistic statistic,
                                           Index k, const TailMethod& method,
                                           std::uint64_t subset_budget, int workers) {
  TailQuery q;
  q.statistic = statistic;
  q.k = k;
  q.method = method;
  validate_query(phi, q);
  const StatisticEvaluator eval(phi, statistic);

  std::vector<double> values;
  if (std::holds_alternative<Exhaustive>(method)) {
    values.reserve(exhaustive_size(phi, statistic, k, subset_budget));
    enumerate_values(phi, eval, statistic, k, [&](double v) { values.push_back(v); });
  } else {
    const auto& mc = std::get<MonteCarlo>(method);
    values.resize(mc.trials);
    sample_values(phi, eval, k, mc, workers,
                  [&](std::uint64_t t, double v) { values[t] = v; });
  }
  std::sort(values.begin(), values.end());

  std::vector<std::pair<double, std::uint64_t>> groups;
  for (const double v : values) {
    if (!groups.empty() &&
        v - groups.back().first <= 1e-9 * std::max(1.0, std::abs(groups.back().first))) {
      ++groups.back().second;
    } else {
      groups.emplace_back(v, 1);
    }
  }
  const auto total = static_cast<double>(values.size());
  std::vector<ProfileAtom> atoms;
  atoms.reserve(groups.size());
  std::uint64_t remaining = values.size();
  for (const auto& [value, count] : groups) {
    atoms.push_back({value, static_cast<double>(count) / total,
                     static_cast<double>(remaining) / total});
    remaining -= count;
  }
  return atoms;
}

std::vector<ProfileAtom> strip_profile(const SensingMatrix& phi, Index k,
                                       const TailMethod& method, std::uint64_t subset_budget,
                                       int workers) {
  return statistic_profile(phi, TailStatistic::kStripDelta, k, method, subset_budget, workers);
}

}  // namespace striplab
