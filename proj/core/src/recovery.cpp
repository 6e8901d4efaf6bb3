#include "striplab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "striplab/parallel.hpp"
#include "striplab/rng.hpp"

namespace striplab {

MagnitudeRule parse_magnitude_rule(const std::string& text) {
  if (text == "unit") return {};
  const std::string prefix = "uniform:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string body = text.substr(prefix.size());
    const auto comma = body.find(',');
    if (comma != std::string::npos) {
      try {
        std::size_t used_lo = 0;
        std::size_t used_hi = 0;
        const std::string lo_text = body.substr(0, comma);
        const std::string hi_text = body.substr(comma + 1);
        const double lo = std::stod(lo_text, &used_lo);
        const double hi = std::stod(hi_text, &used_hi);
        if (used_lo == lo_text.size() && used_hi == hi_text.size() && std::isfinite(hi) &&
            lo > 0.0 && lo <= hi) {
          return {MagnitudeRule::Kind::kUniform, lo, hi};
        }
      } catch (const std::exception&) {
        // Reported below.
      }
    }
  }
  throw Error(ErrorCode::kInvalidMagnitudeRule,
              "expected 'unit' or 'uniform:LO,HI' with 0 < LO <= HI, got '" + text + "'");
}

std::string to_string(const MagnitudeRule& rule) {
  if (rule.kind == MagnitudeRule::Kind::kUnit) return "unit";
  std::ostringstream out;
  out.precision(17);
  out << "uniform:" << rule.lo << ',' << rule.hi;
  return out.str();
}

GenericSignal sample_generic_signal(Index n, Index k, const MagnitudeRule& rule,
                                    std::uint64_t seed, std::uint64_t stream,
                                    std::optional<double> tail_level) {
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= k <= N");
  }
  if (rule.kind == MagnitudeRule::Kind::kUniform && !(rule.lo > 0.0 && rule.lo <= rule.hi)) {
    throw Error(ErrorCode::kInvalidMagnitudeRule, "uniform magnitudes need 0 < lo <= hi");
  }
  if (tail_level && !(*tail_level >= 0.0 && *tail_level < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tail level must lie in [0, 1)");
  }
  CounterRng rng(seed, stream);
  GenericSignal s;
  s.n = n;
  s.support.resize(static_cast<std::size_t>(k));
  sample_prefix<Index>(rng, n, s.support);
  std::sort(s.support.begin(), s.support.end());
  s.signs.reserve(s.support.size());
  s.magnitudes.reserve(s.support.size());
  for (std::size_t i = 0; i < s.support.size(); ++i) s.signs.push_back(rng.sign());
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    s.magnitudes.push_back(rule.kind == MagnitudeRule::Kind::kUnit
                               ? 1.0
                               : rng.uniform(rule.lo, rule.hi));
  }
  s.x = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < s.support.size(); ++i) {
    s.x(s.support[i]) = s.signs[i] * s.magnitudes[i];
  }
  if (tail_level) {
    const double cap = *tail_level * *std::min_element(s.magnitudes.begin(), s.magnitudes.end());
    Eigen::VectorXd tail = Eigen::VectorXd::Zero(n);
    std::size_t next = 0;
    for (Index i = 0; i < n; ++i) {
      if (next < s.support.size() && s.support[next] == i) {
        ++next;
        continue;
      }
      // uniform(-1, 1) can return -1 exactly; fold that onto 0.
      const double u = rng.uniform(-1.0, 1.0);
      tail(i) = u == -1.0 ? 0.0 : cap * u;
    }
    s.x += tail;
    s.tail = std::move(tail);
  }
  return s;
}

namespace {

template <typename Matrix>
struct Factored {
  using Scalar = typename Matrix::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Matrix phi;
  Eigen::LLT<Matrix> llt;

  explicit Factored(Matrix p) : phi(std::move(p)) {
    const Matrix row_gram = phi * phi.adjoint();
    llt.compute(row_gram);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      const Eigen::VectorXd diag = llt.matrixLLT().diagonal().real();
      ok = diag.minCoeff() > 1e-7 * diag.maxCoeff();
    }
    if (!ok) {
      throw Error(ErrorCode::kRankDeficient,
                  "row Gram of the " + std::to_string(phi.rows()) + " x " +
                      std::to_string(phi.cols()) + " matrix is not invertible");
    }
  }

  // Orthogonal projection onto {x : Φx = b}.
  Vector project(const Vector& v, const Vector& b) const {
    return v - phi.adjoint() * llt.solve(phi * v - b);
  }
};

template <typename Vector>
double l1_norm(const Vector& v) {
  return v.cwiseAbs().sum();
}

template <typename Vector>
void shrink(Vector& v, double tau) {
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    v(i) = mag <= tau ? typename Vector::Scalar(0) : v(i) * ((mag - tau) / mag);
  }
}

// Least-squares fit on the support of `z`; returns nothing if the support is
// larger than m, rank deficient, or the fit is not feasible.
template <typename Matrix>
std::optional<typename Factored<Matrix>::Vector> polish(const Factored<Matrix>& f,
                                                        const typename Factored<Matrix>::Vector& z,
                                                        const typename Factored<Matrix>::Vector& b,
                                                        double feas_tol) {
  using Vector = typename Factored<Matrix>::Vector;
  const double peak = z.cwiseAbs().maxCoeff();
  if (!(peak > 0.0)) return std::nullopt;
  std::vector<Index> support;
  for (Index i = 0; i < z.size(); ++i) {
    if (std::abs(z(i)) > 1e-9 * peak) support.push_back(i);
  }
  if (static_cast<Index>(support.size()) > f.phi.rows()) return std::nullopt;
  Matrix sub(f.phi.rows(), static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) sub.col(static_cast<Index>(j)) = f.phi.col(support[j]);
  const Eigen::ColPivHouseholderQR<Matrix> qr(sub);
  if (qr.rank() < sub.cols()) return std::nullopt;
  const Vector coef = qr.solve(b);
  if ((sub * coef - b).norm() > feas_tol * (1.0 + b.norm())) return std::nullopt;
  Vector out = Vector::Zero(z.size());
  for (std::size_t j = 0; j < support.size(); ++j) out(support[j]) = coef(static_cast<Index>(j));
  return out;
}

// Dual certificate for min ‖x‖₁ s.t. Φx = b at a feasible x with support S:
// w = Φ_S (Φ_S^*Φ_S)^{-1} sgn(x_S) satisfies Φ_S^* w = sgn(x_S), and if also
// |φ_j^* w| <= 1 off S then x is a minimizer.
template <typename Matrix>
bool certified_optimal(const Factored<Matrix>& f, const typename Factored<Matrix>::Vector& x) {
  using Vector = typename Factored<Matrix>::Vector;
  std::vector<Index> support;
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) != typename Vector::Scalar(0)) support.push_back(i);
  }
  if (support.empty()) return true;
  Matrix sub(f.phi.rows(), static_cast<Index>(support.size()));
  Vector sgn(static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j) {
    sub.col(static_cast<Index>(j)) = f.phi.col(support[j]);
    sgn(static_cast<Index>(j)) = x(support[j]) / std::abs(x(support[j]));
  }
  const Matrix gram = sub.adjoint() * sub;
  const Eigen::LDLT<Matrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) return false;
  const Vector w = sub * ldlt.solve(sgn);
  if ((sub.adjoint() * w - sgn).cwiseAbs().maxCoeff() > 1e-9) return false;
  return (f.phi.adjoint() * w).cwiseAbs().maxCoeff() <= 1.0 + 1e-9;
}

template <typename Matrix>
BasisPursuitResult admm(const Factored<Matrix>& f, const typename Factored<Matrix>::Vector& y,
                        const SolverConfig& cfg) {
  using Vector = typename Factored<Matrix>::Vector;
  const Index n = f.phi.cols();
  BasisPursuitResult result;
  const double scale = y.norm();
  if (scale == 0.0) {
    result.x = Eigen::VectorXcd::Zero(n);
    return result;
  }
  // Solve for b = y/‖y‖ so tolerances are scale free, then rescale.
  const Vector b = y / scale;

  const Vector zero = Vector::Zero(n);
  Vector x = f.project(zero, b);
  Vector z = x;
  Vector u = Vector::Zero(n);
  double rho = cfg.rho;
  const int window = std::max(1, cfg.stall_window);
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(std::min(cfg.max_iters, 100'000)));

  bool converged = false;
  std::optional<Vector> certified;
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    x = f.project(z - u, b);
    Vector z_prev = z;
    z = x + u;
    shrink(z, 1.0 / rho);
    u += x - z;

    const double primal = (x - z).norm();
    const double dual = rho * (z - z_prev).norm();
    const double obj = l1_norm(z);
    history.push_back(obj);

    const double tol = cfg.convergence_tol * std::sqrt(static_cast<double>(n));
    if (primal <= tol * std::max(1.0, z.norm()) &&
        dual <= tol * std::max(1.0, rho * u.norm())) {
      converged = true;
      ++it;
      break;
    }
    if (static_cast<int>(history.size()) > window && primal <= 1e-7) {
      const double before = history[history.size() - 1 - static_cast<std::size_t>(window)];
      if (std::abs(obj - before) <= cfg.stall_tol * std::max(1.0, obj)) {
        converged = true;
        ++it;
        break;
      }
    }
    if ((it + 1) % 25 == 0) {
      auto fitted = polish(f, z, b, cfg.feasibility_tol);
      if (fitted && certified_optimal(f, *fitted)) {
        certified = std::move(fitted);
        converged = true;
        ++it;
        break;
      }
    }
    if ((it + 1) % 10 == 0) {
      if (primal > 10.0 * dual) {
        rho *= 2.0;
        u /= 2.0;
      } else if (dual > 10.0 * primal) {
        rho /= 2.0;
        u *= 2.0;
      }
    }
  }

  Vector best = f.project(z, b);
  result.polished = false;
  if (certified) {
    best = std::move(*certified);
    result.polished = true;
  } else if (auto fitted = polish(f, z, b, cfg.feasibility_tol)) {
    if (l1_norm(*fitted) <= l1_norm(best) * (1.0 + 1e-12)) {
      best = std::move(*fitted);
      result.polished = true;
    }
  }
  best *= scale;
  result.x = best.template cast<Complex>();
  result.iterations = it;
  result.residual = (f.phi * best - y).norm();
  result.objective = l1_norm(best);
  if (!converged) {
    throw SolverError("no convergence after " + std::to_string(cfg.max_iters) + " iterations",
                      result);
  }
  return result;
}

void validate_config(const SolverConfig& cfg) {
  if (!(cfg.feasibility_tol > 0.0) || !(cfg.stall_tol > 0.0) || cfg.stall_window < 1 ||
      cfg.max_iters < 1 || !(cfg.rho > 0.0) || !(cfg.convergence_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "solver settings must be positive");
  }
}

}  // namespace

struct BasisPursuitSolver::Impl {
  SolverConfig cfg;
  Index rows = 0;
  std::optional<Factored<Eigen::MatrixXd>> real;
  std::optional<Factored<Eigen::MatrixXcd>> complex;
};

BasisPursuitSolver::BasisPursuitSolver(const SensingMatrix& phi, SolverConfig cfg)
    : impl_(std::make_unique<Impl>()) {
  validate_config(cfg);
  impl_->cfg = cfg;
  impl_->rows = phi.rows();
  if (phi.is_real()) {
    impl_->real.emplace(phi.real_part());
  } else {
    impl_->complex.emplace(phi.entries());
  }
}

BasisPursuitSolver::~BasisPursuitSolver() = default;
BasisPursuitSolver::BasisPursuitSolver(BasisPursuitSolver&&) noexcept = default;
BasisPursuitSolver& BasisPursuitSolver::operator=(BasisPursuitSolver&&) noexcept = default;

const SolverConfig& BasisPursuitSolver::config() const noexcept { return impl_->cfg; }

BasisPursuitResult BasisPursuitSolver::solve(const Eigen::VectorXcd& y) const {
  if (y.size() != impl_->rows) {
    throw Error(ErrorCode::kDimensionMismatch, "measurement length " + std::to_string(y.size()) +
                                                   " does not match m=" +
                                                   std::to_string(impl_->rows));
  }
  if (!y.allFinite()) throw Error(ErrorCode::kInvalidArgument, "measurements must be finite");
  if (impl_->complex) return admm(*impl_->complex, y, impl_->cfg);
  if (y.imag().isZero(0.0)) {
    const Eigen::VectorXd y_real = y.real();
    return admm(*impl_->real, y_real, impl_->cfg);
  }
  // Real dictionary with complex data: the modulus objective couples the
  // real and imaginary parts, so solve in complex arithmetic.
  const Factored<Eigen::MatrixXcd> promoted(impl_->real->phi.cast<Complex>());
  return admm(promoted, y, impl_->cfg);
}

Eigen::VectorXcd basis_pursuit(const SensingMatrix& phi, const Eigen::VectorXcd& y,
                               const SolverConfig& cfg) {
  return BasisPursuitSolver(phi, cfg).solve(y).x;
}

std::vector<Index> top_k_support(const Eigen::VectorXd& x, Index k) {
  if (k < 0 || k > x.size()) throw Error(ErrorCode::kInvalidArgument, "need 0 <= k <= N");
  std::vector<Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(x(a)) > std::abs(x(b)); });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

double sigma_k(const Eigen::VectorXd& x, Index k) {
  if (k < 0 || k > x.size()) throw Error(ErrorCode::kInvalidArgument, "need 0 <= k <= N");
  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x(i));
  std::sort(mags.begin(), mags.end());
  return std::accumulate(mags.begin(), mags.end() - k, 0.0);
}

RecoveryMetrics recovery_metrics(const Eigen::VectorXd& x, const Eigen::VectorXcd& xhat,
                                 std::span<const Index> support, double eps) {
  if (xhat.size() != x.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "estimate and signal lengths differ");
  }
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  validate_support(support, x.size());
  const auto k = static_cast<Index>(support.size());
  std::vector<Index> given(support.begin(), support.end());
  std::sort(given.begin(), given.end());
  if (given != top_k_support(x, k)) {
    throw Error(ErrorCode::kSupportMismatch,
                "support is not the set of the k largest entries of x");
  }

  RecoveryMetrics r;
  r.sigma_k = sigma_k(x, k);
  const std::unordered_set<Index> inside(given.begin(), given.end());
  double on = 0.0;
  double off = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const double diff = std::abs(Complex(x(i)) - xhat(i));
    if (inside.contains(i)) {
      on += diff * diff;
    } else {
      off += diff;
    }
  }
  r.err_sup = std::sqrt(on);
  r.err_off = off;
  const double n = static_cast<double>(x.size());
  r.sup_bound = r.sigma_k / (2.0 * std::sqrt(2.0 * std::log(2.0 * n / eps)));
  r.off_bound = 4.0 * r.sigma_k;
  const double slack = 1e-6 * std::max(1.0, x.norm());
  r.sup_holds = r.err_sup <= r.sup_bound + slack;
  r.off_holds = r.err_off <= r.off_bound + slack;
  r.exact = (x.cast<Complex>() - xhat).norm() <= slack;
  return r;
}

RecoveryTrial run_recovery_trial(const SensingMatrix& phi, const BasisPursuitSolver& solver,
                                 const RecoveryOptions& opts, std::uint64_t trial) {
  RecoveryTrial t;
  t.signal = sample_generic_signal(phi.cols(), opts.k, opts.magnitudes, opts.seed, trial,
                                   opts.tail_level);
  const Eigen::VectorXcd y = phi.entries() * t.signal.x.cast<Complex>();
  BasisPursuitResult solved;
  try {
    solved = solver.solve(y);
  } catch (const SolverError& e) {
    solved = e.best();
    t.converged = false;
  }
  t.estimate = std::move(solved.x);
  t.residual = solved.residual;
  t.l1_objective = solved.objective;
  t.metrics = recovery_metrics(t.signal.x, t.estimate, t.signal.support, opts.eps);
  return t;
}

RecoverySummary recovery_experiment(const SensingMatrix& phi, const RecoveryOptions& opts) {
  if (opts.k < 1 || opts.k > phi.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= k <= N");
  }
  if (opts.trials < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one trial");
  if (!(opts.eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  const BasisPursuitSolver solver(phi, opts.solver);

  struct Outcome {
    bool failed = false;
    bool exact = false;
    bool converged = true;
    bool feasible = true;
    bool objective_ok = true;
    double residual = 0.0;
  };
  std::vector<Outcome> outcomes(opts.trials);
  parallel_ranges(opts.trials, resolve_workers(opts.workers),
                  [&](std::uint64_t begin, std::uint64_t end, int) {
                    for (std::uint64_t i = begin; i < end; ++i) {
                      const RecoveryTrial t = run_recovery_trial(phi, solver, opts, i);
                      const double y_norm =
                          (phi.entries() * t.signal.x.cast<Complex>()).norm();
                      Outcome& o = outcomes[i];
                      o.failed = !(t.metrics.sup_holds && t.metrics.off_holds) || !t.converged;
                      o.exact = t.metrics.exact;
                      o.converged = t.converged;
                      o.residual = t.residual;
                      o.feasible =
                          t.residual <= opts.solver.feasibility_tol * (1.0 + y_norm);
                      o.objective_ok = t.l1_objective <= t.signal.x.lpNorm<1>() + 1e-6;
                    }
                  });

  RecoverySummary s;
  s.trials = opts.trials;
  for (const auto& o : outcomes) {
    s.failures += o.failed ? 1 : 0;
    s.exact_recoveries += o.exact ? 1 : 0;
    s.nonconverged += o.converged ? 0 : 1;
    s.feasibility_violations += o.feasible ? 0 : 1;
    s.objective_violations += o.objective_ok ? 0 : 1;
    s.max_residual = std::max(s.max_residual, o.residual);
  }
  const auto total = static_cast<double>(s.trials);
  s.failure_rate = static_cast<double>(s.failures) / total;
  s.exact_rate = static_cast<double>(s.exact_recoveries) / total;
  s.failure_ci = clopper_pearson(s.failures, s.trials, opts.ci_level);
  s.exact_ci = clopper_pearson(s.exact_recoveries, s.trials, opts.ci_level);
  s.reference_line = 3.0 * opts.eps;
  return s;
}

}  // namespace striplab
