#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "striplab/frame.hpp"

namespace striplab {

// Frame summary plus the (k, δ, ε) target. Counts are held as doubles so
// that asymptotic regimes with astronomically large N can be evaluated.
struct ConditionInputs {
  double mu = 0.0;
  double mu_bar_sq = 0.0;
  double spectral_norm_sq = 0.0;
  double m = 0.0;
  double n = 0.0;
  double k = 0.0;
  double delta = 0.0;
  double eps = 0.0;
};

ConditionInputs inputs_from_profile(const CoherenceProfile& profile, Index m, Index n,
                                    double k, double delta, double eps);

// Upper limit on ε for the StRIP sufficient condition: min(1/k, e^{1 - 1/ln 2}).
double theorem1_eps_limit(double k);

struct GridSpec {
  int points_per_axis = 64;
  int refine_points = 16;
  double lo = 1e-6;
  double hi = 1.0 - 1e-6;
};

// One inequality lhs <= rhs.
struct Constraint {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;

  bool holds() const noexcept { return lhs <= rhs; }
  // (rhs - lhs) / rhs, so constraints on different scales are comparable.
  double margin() const noexcept;
};

// The three StRIP inequalities at (a, b, c), labelled "coherence",
// "average-coherence" and "abc-sum".
std::array<Constraint, 3> theorem1_constraints(const ConditionInputs& in, double a, double b,
                                               double c);

struct TheoremWitness {
  bool feasible = false;
  std::optional<double> a, b, c;
  // Smallest normalized margin over the constraints at the reported point.
  double slack = 0.0;
  std::string binding_constraint;
  // Constraints that failed at every grid point (empty when feasible).
  std::vector<std::string> never_satisfied;
};

// Grid search over (a, b, c) ∈ (lo, hi)³ maximizing the smallest normalized
// margin; one refinement pass around the best cell. Throws EpsOutOfRange.
TheoremWitness check_theorem1(const ConditionInputs& in, const GridSpec& grid = {});

struct Theorem2Result {
  bool holds = false;
  double alpha = 0.0;
  double a = 0.0;
  std::array<Constraint, 2> constraints;
};

// SINC sufficient condition at a fixed (β, a); α = β / ln(2N/ε).
Theorem2Result check_theorem2(const ConditionInputs& in, double beta, double a);

// Searches a ∈ (0, 1) for the given β. Both inequalities are monotone in a,
// so the admissible set is an interval; the midpoint is reported.
Theorem2Result scan_theorem2(const ConditionInputs& in, double beta);

// β giving the requested α.
double theorem2_beta_for_alpha(double alpha, double n, double eps);

struct Corollary1Result {
  bool holds = false;
  double bound = 0.0;
  double a = 0.0;
  std::array<Constraint, 2> constraints;
};

// Column-sum tail condition. Throws AlphaBetaOrder if α >= β·log₂e.
Corollary1Result check_corollary1(double mu, double mu_bar_sq, double k, double alpha,
                                  double beta, double a);

// Same as check_corollary1 with a chosen from the admissible interval.
Corollary1Result scan_corollary1(double mu, double mu_bar_sq, double k, double alpha,
                                 double beta);

// (1 - δ)² / (8 ln(2N/ε)).
double required_sinc_level(double delta, double n, double eps);

struct RegimeConstants {
  std::array<double, 6> c{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
};

struct RegimeClause {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct RegimeReport {
  bool near_optimal = false;   // μ <= C1/ln N, ‖Φ‖² <= C2·N/(k ln N)
  bool coherence = false;      // μ <= C3/√(k ln k), ‖Φ‖² <= C4·N/k
  bool extended = false;       // μ <= C5/(k ln k)^{1/4}, μ̄² <= C6/k, ‖Φ‖² <= C4·N/k
  std::vector<RegimeClause> clauses;
  RegimeConstants constants;
  bool heuristic = true;  // the asymptotic statements carry no constants
};

RegimeReport regime_report(const ConditionInputs& in, const RegimeConstants& constants = {});

}  // namespace striplab
