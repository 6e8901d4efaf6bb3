#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "striplab/binomial.hpp"
#include "striplab/errors.hpp"
#include "striplab/frame.hpp"

namespace striplab {

struct MagnitudeRule {
  enum class Kind { kUnit, kUniform };
  Kind kind = Kind::kUnit;
  double lo = 1.0;
  double hi = 1.0;
};

// Parses "unit" or "uniform:LO,HI" with 0 < LO <= HI. Throws InvalidMagnitudeRule.
MagnitudeRule parse_magnitude_rule(const std::string& text);
std::string to_string(const MagnitudeRule& rule);

struct GenericSignal {
  Index n = 0;
  std::vector<Index> support;  // ascending
  std::vector<int> signs;      // aligned with support
  std::vector<double> magnitudes;
  std::optional<Eigen::VectorXd> tail;  // off-support values, zero on the support
  Eigen::VectorXd x;
};

// Uniform k-subset, i.i.d. uniform signs, magnitudes from `rule`. With
// `tail_level` in [0, 1) every off-support entry is uniform in
// (-tail_level·min magnitude, tail_level·min magnitude), so the support stays
// the unique top-k set. Deterministic in (seed, stream).
GenericSignal sample_generic_signal(Index n, Index k, const MagnitudeRule& rule,
                                    std::uint64_t seed, std::uint64_t stream = 0,
                                    std::optional<double> tail_level = std::nullopt);

struct SolverConfig {
  double feasibility_tol = 1e-9;  // relative to ‖y‖₂
  double stall_tol = 1e-10;
  int stall_window = 50;
  int max_iters = 50'000;
  double rho = 1.0;             // initial penalty, rescaled by residual balancing
  double convergence_tol = 1e-10;
};

struct BasisPursuitResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  double residual = 0.0;   // ‖Φx̂ - y‖₂
  double objective = 0.0;  // Σ|x̂_i|
  bool polished = false;   // x̂ came from the least-squares fit on the detected support
};

// Thrown when the iteration budget runs out; carries the best iterate.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, BasisPursuitResult best)
      : Error(ErrorCode::kMaxItersExceeded, what), best_(std::move(best)) {}

  const BasisPursuitResult& best() const noexcept { return best_; }

 private:
  BasisPursuitResult best_;
};

// Factorized row Gram of Φ, reusable across right-hand sides. Throws
// RankDeficient if ΦΦ^* is singular to working precision.
class BasisPursuitSolver {
 public:
  explicit BasisPursuitSolver(const SensingMatrix& phi, SolverConfig cfg = {});
  ~BasisPursuitSolver();
  BasisPursuitSolver(BasisPursuitSolver&&) noexcept;
  BasisPursuitSolver& operator=(BasisPursuitSolver&&) noexcept;

  // min ‖x‖₁ subject to Φx = y, by alternating projection onto the affine
  // set and ℓ1 shrinkage (modulus shrinkage for complex data).
  BasisPursuitResult solve(const Eigen::VectorXcd& y) const;

  const SolverConfig& config() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXcd basis_pursuit(const SensingMatrix& phi, const Eigen::VectorXcd& y,
                               const SolverConfig& cfg = {});

// Σ of the N - k smallest magnitudes of x.
double sigma_k(const Eigen::VectorXd& x, Index k);

// Indices of the k largest magnitudes, ties broken by lower index, ascending.
std::vector<Index> top_k_support(const Eigen::VectorXd& x, Index k);

struct RecoveryMetrics {
  double sigma_k = 0.0;
  double err_sup = 0.0;  // ‖x_I - x̂_I‖₂
  double err_off = 0.0;  // ‖x_{I^c} - x̂_{I^c}‖₁
  double sup_bound = 0.0;
  double off_bound = 0.0;
  bool sup_holds = false;
  bool off_holds = false;
  bool exact = false;  // ‖x̂ - x‖₂ <= 1e-6·max(1, ‖x‖₂)
};

// Error split on and off the support with the two error bounds at level ε.
// Bounds are compared with additive slack 1e-6·max(1, ‖x‖₂) so that solver
// round-off does not register as a violation. Throws SupportMismatch.
RecoveryMetrics recovery_metrics(const Eigen::VectorXd& x, const Eigen::VectorXcd& xhat,
                                 std::span<const Index> support, double eps);

struct RecoveryTrial {
  GenericSignal signal;
  Eigen::VectorXcd estimate;
  double residual = 0.0;
  double l1_objective = 0.0;
  RecoveryMetrics metrics;
  bool converged = true;
};

struct RecoverySummary {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::uint64_t exact_recoveries = 0;
  std::uint64_t nonconverged = 0;
  std::uint64_t feasibility_violations = 0;
  std::uint64_t objective_violations = 0;  // ‖x̂‖₁ > ‖x‖₁ + 1e-6
  double failure_rate = 0.0;
  double exact_rate = 0.0;
  Interval failure_ci;
  Interval exact_ci;
  double reference_line = 0.0;  // 3ε
  double max_residual = 0.0;
};

struct RecoveryOptions {
  Index k = 1;
  std::uint64_t trials = 1;
  double eps = 0.05;
  MagnitudeRule magnitudes;
  std::uint64_t seed = 0;
  std::optional<double> tail_level;
  SolverConfig solver;
  double ci_level = 0.99;
  int workers = 0;
};

// Trial t draws its signal with stream t, so counts do not depend on the
// worker count.
RecoverySummary recovery_experiment(const SensingMatrix& phi, const RecoveryOptions& opts);

RecoveryTrial run_recovery_trial(const SensingMatrix& phi, const BasisPursuitSolver& solver,
                                 const RecoveryOptions& opts, std::uint64_t trial);

}  // namespace striplab
