#include "striplab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "striplab/errors.hpp"

namespace striplab {

namespace {

void validate_inputs(const ConditionInputs& in) {
  const double fields[] = {in.mu, in.mu_bar_sq, in.spectral_norm_sq, in.m,
                           in.n,  in.k,         in.delta,            in.eps};
  for (const double v : fields) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "condition inputs must be finite and >= 0");
    }
  }
  if (!(in.k < in.n)) throw Error(ErrorCode::kInvalidArgument, "k must be below N");
}

void require_open_unit(double value, const char* name) {
  if (!(value > 0.0 && value < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must lie in (0, 1)");
  }
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  if (points == 1) {
    out[0] = std::sqrt(lo * hi);
    return out;
  }
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  return out;
}

double min_margin(const std::array<Constraint, 3>& cs, std::size_t* which) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double m = cs[i].margin();
    if (m < best) {
      best = m;
      *which = i;
    }
  }
  return best;
}

// Admissible interval for a from lower bound `lo` and upper bound `hi`,
// intersected with (0, 1). Returns the midpoint or nullopt.
std::optional<double> pick_a(double lo, double hi) {
  lo = std::max(lo, 0.0);
  hi = std::min(hi, 1.0);
  if (!(lo < hi) || hi <= 0.0 || lo >= 1.0) return std::nullopt;
  return 0.5 * (lo + hi);
}

}  // namespace

double Constraint::margin() const noexcept {
  if (rhs > 0.0) return (rhs - lhs) / rhs;
  if (lhs <= rhs) return 0.0;
  return -std::numeric_limits<double>::infinity();
}

ConditionInputs inputs_from_profile(const CoherenceProfile& profile, Index m, Index n,
                                    double k, double delta, double eps) {
  ConditionInputs in;
  in.mu = profile.mu;
  in.mu_bar_sq = profile.mu_bar_sq;
  in.spectral_norm_sq = profile.spectral_norm * profile.spectral_norm;
  in.m = static_cast<double>(m);
  in.n = static_cast<double>(n);
  in.k = k;
  in.delta = delta;
  in.eps = eps;
  return in;
}

double theorem1_eps_limit(double k) {
  return std::min(1.0 / k, std::exp(1.0 - 1.0 / std::numbers::ln2));
}

std::array<Constraint, 3> theorem1_constraints(const ConditionInputs& in, double a, double b,
                                               double c) {
  const double l1 = std::log(1.0 / in.eps);
  const double mu2 = in.mu * in.mu;
  const double first = (1.0 - a) * (1.0 - a) * b * b /
                       (32.0 * std::log(2.0 * in.k) * std::log(std::numbers::e / in.eps));
  std::array<Constraint, 3> out;
  out[0] = {"coherence", in.k * mu2 * mu2, std::min(first, c * c) / (l1 * l1)};
  out[1] = {"average-coherence", in.k * in.mu_bar_sq, a * b / l1};
  out[2] = {"abc-sum",
            std::sqrt(a) + std::sqrt(2.0 * a * b) + std::sqrt(c) +
                2.0 * in.k / in.n * in.spectral_norm_sq,
            std::exp(-0.25) * in.delta / (6.0 * std::numbers::sqrt2)};
  return out;
}

TheoremWitness check_theorem1(const ConditionInputs& in, const GridSpec& grid) {
  validate_inputs(in);
  if (!(in.k >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  const double limit = theorem1_eps_limit(in.k);
  if (!(in.eps > 0.0 && in.eps < limit)) {
    throw Error(ErrorCode::kEpsOutOfRange,
                "eps=" + std::to_string(in.eps) + " must lie in (0, " +
                    std::to_string(limit) + ")");
  }
  if (grid.points_per_axis < 2 || !(grid.lo > 0.0 && grid.lo < grid.hi && grid.hi < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid grid specification");
  }

  const auto axis = log_grid(grid.lo, grid.hi, grid.points_per_axis);
  std::array<bool, 3> ever{false, false, false};
  double best = -std::numeric_limits<double>::infinity();
  std::array<std::size_t, 3> best_idx{0, 0, 0};
  std::array<double, 3> best_point{axis[0], axis[0], axis[0]};
  std::size_t best_binding = 0;

  auto consider = [&](double a, double b, double c) {
    const auto cs = theorem1_constraints(in, a, b, c);
    for (std::size_t i = 0; i < 3; ++i) ever[i] = ever[i] || cs[i].holds();
    std::size_t which = 0;
    const double score = min_margin(cs, &which);
    if (score > best) {
      best = score;
      best_point = {a, b, c};
      best_binding = which;
      return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < axis.size(); ++i) {
    for (std::size_t j = 0; j < axis.size(); ++j) {
      for (std::size_t l = 0; l < axis.size(); ++l) {
        if (consider(axis[i], axis[j], axis[l])) best_idx = {i, j, l};
      }
    }
  }

  if (grid.refine_points >= 2) {
    std::array<std::vector<double>, 3> local;
    for (std::size_t d = 0; d < 3; ++d) {
      const std::size_t idx = best_idx[d];
      const double lo = axis[idx == 0 ? 0 : idx - 1];
      const double hi = axis[std::min(idx + 1, axis.size() - 1)];
      local[d] = log_grid(lo, hi, grid.refine_points);
    }
    for (const double a : local[0]) {
      for (const double b : local[1]) {
        for (const double c : local[2]) consider(a, b, c);
      }
    }
  }

  const auto cs = theorem1_constraints(in, best_point[0], best_point[1], best_point[2]);
  TheoremWitness w;
  w.feasible = cs[0].holds() && cs[1].holds() && cs[2].holds();
  w.slack = best;
  w.binding_constraint = cs[best_binding].label;
  if (w.feasible) {
    w.a = best_point[0];
    w.b = best_point[1];
    w.c = best_point[2];
  } else {
    for (std::size_t i = 0; i < 3; ++i) {
      if (!ever[i]) w.never_satisfied.push_back(cs[i].label);
    }
    if (w.never_satisfied.empty()) w.never_satisfied.push_back("joint");
  }
  return w;
}

double theorem2_beta_for_alpha(double alpha, double n, double eps) {
  return alpha * std::log(2.0 * n / eps);
}

Theorem2Result check_theorem2(const ConditionInputs& in, double beta, double a) {
  validate_inputs(in);
  if (!(beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be positive");
  require_open_unit(a, "a");
  if (!(in.eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  const double log_term = std::log(2.0 * in.n / in.eps);
  const double mu2 = in.mu * in.mu;
  Theorem2Result r;
  r.alpha = beta / log_term;
  r.a = a;
  r.constraints[0] = {"coherence", mu2 * mu2,
                      (1.0 - a) * (1.0 - a) * beta * beta /
                          (32.0 * in.k * log_term * log_term * log_term)};
  r.constraints[1] = {"average-coherence", in.mu_bar_sq, a * beta / (in.k * log_term)};
  r.holds = r.constraints[0].holds() && r.constraints[1].holds();
  return r;
}

Theorem2Result scan_theorem2(const ConditionInputs& in, double beta) {
  validate_inputs(in);
  if (!(beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be positive");
  const double log_term = std::log(2.0 * in.n / in.eps);
  const double mu2 = in.mu * in.mu;
  // coherence: (1-a) >= μ²·√(32 k L³)/β; average: a >= k μ̄² L / β.
  const double hi = 1.0 - mu2 * std::sqrt(32.0 * in.k * log_term * log_term * log_term) / beta;
  const double lo = in.k * in.mu_bar_sq * log_term / beta;
  const auto a = pick_a(lo, hi);
  Theorem2Result r = check_theorem2(in, beta, a.value_or(std::clamp(lo, 1e-12, 1.0 - 1e-12)));
  // Guard the midpoint against rounding at the interval ends.
  r.holds = a.has_value() && r.holds;
  return r;
}

Corollary1Result check_corollary1(double mu, double mu_bar_sq, double k, double alpha,
                                  double beta, double a) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(k >= 1.0) || mu < 0.0 || mu_bar_sq < 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "alpha, beta must be positive, k >= 1, coherences nonnegative");
  }
  require_open_unit(a, "a");
  if (alpha >= beta * std::numbers::log2e) {
    throw Error(ErrorCode::kAlphaBetaOrder,
                "alpha=" + std::to_string(alpha) + " must be below beta*log2(e)=" +
                    std::to_string(beta * std::numbers::log2e));
  }
  const double mu2 = mu * mu;
  Corollary1Result r;
  r.a = a;
  r.bound = 2.0 * std::exp(-beta / alpha);
  r.constraints[0] = {"coherence", mu2 * mu2,
                      (1.0 - a) * (1.0 - a) * alpha * alpha * alpha / (32.0 * beta * k)};
  r.constraints[1] = {"average-coherence", k * mu_bar_sq, a * alpha};
  r.holds = r.constraints[0].holds() && r.constraints[1].holds();
  return r;
}

Corollary1Result scan_corollary1(double mu, double mu_bar_sq, double k, double alpha,
                                 double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(k >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha, beta must be positive and k >= 1");
  }
  const double mu2 = mu * mu;
  const double hi = 1.0 - mu2 * std::sqrt(32.0 * beta * k / (alpha * alpha * alpha));
  const double lo = k * mu_bar_sq / alpha;
  const auto a = pick_a(lo, hi);
  Corollary1Result r =
      check_corollary1(mu, mu_bar_sq, k, alpha, beta, a.value_or(std::clamp(lo, 1e-12, 1.0 - 1e-12)));
  r.holds = a.has_value() && r.holds;
  return r;
}

double required_sinc_level(double delta, double n, double eps) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must lie in [0, 1]");
  }
  if (!(n > 0.0) || !(eps > 0.0) || !(2.0 * n / eps > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need N > 0, eps > 0 and 2N/eps > 1");
  }
  return (1.0 - delta) * (1.0 - delta) / (8.0 * std::log(2.0 * n / eps));
}

RegimeReport regime_report(const ConditionInputs& in, const RegimeConstants& constants) {
  validate_inputs(in);
  if (!(in.k >= 1.0) || !(in.n > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "regimes need k >= 1 and N > 1");
  }
  const auto& c = constants.c;
  const double log_n = std::log(in.n);
  const double k_log_k = in.k * std::log(in.k);
  const double inf = std::numeric_limits<double>::infinity();
  // k = 1 makes k ln k vanish; the coherence bounds are then unconstrained.
  const double inv_sqrt = k_log_k > 0.0 ? 1.0 / std::sqrt(k_log_k) : inf;
  const double inv_fourth = k_log_k > 0.0 ? 1.0 / std::sqrt(std::sqrt(k_log_k)) : inf;

  RegimeReport r;
  r.constants = constants;
  auto add = [&](std::string label, double lhs, double rhs) {
    r.clauses.push_back({std::move(label), lhs, rhs, lhs <= rhs});
    return lhs <= rhs;
  };
  const bool near_mu = add("near-optimal/mu", in.mu, c[0] / log_n);
  const bool near_norm =
      add("near-optimal/norm", in.spectral_norm_sq, c[1] * in.n / (in.k * log_n));
  const bool coh_mu = add("coherence/mu", in.mu, c[2] * inv_sqrt);
  const bool coh_norm = add("coherence/norm", in.spectral_norm_sq, c[3] * in.n / in.k);
  const bool ext_mu = add("extended/mu", in.mu, c[4] * inv_fourth);
  const bool ext_bar = add("extended/mu-bar-sq", in.mu_bar_sq, c[5] / in.k);
  const bool ext_norm = add("extended/norm", in.spectral_norm_sq, c[3] * in.n / in.k);
  r.near_optimal = near_mu && near_norm;
  r.coherence = coh_mu && coh_norm;
  r.extended = ext_mu && ext_bar && ext_norm;
  return r;
}

}  // namespace striplab
