#include "striplab/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include <Eigen/Dense>

#include "striplab/errors.hpp"

namespace striplab {

std::string to_string(ScalarKind kind) {
  return kind == ScalarKind::kReal ? "real" : "complex";
}

SensingMatrix::SensingMatrix(Eigen::MatrixXcd entries, ScalarKind kind, FrameInfo info,
                             NormCheck norm_check, ShapeCheck shape_check)
    : entries_(std::move(entries)), kind_(kind), info_(std::move(info)) {
  if (rows() < 1 || cols() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sensing matrix must be nonempty");
  }
  if (shape_check == ShapeCheck::kWide && rows() > cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                "sensing matrix needs m <= N, got " + std::to_string(rows()) + " x " +
                    std::to_string(cols()));
  }
  for (Index j = 0; j < cols(); ++j) {
    for (Index i = 0; i < rows(); ++i) {
      const Complex z = entries_(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite entry at (" +
                                                     std::to_string(i) + ", " +
                                                     std::to_string(j) + ")");
      }
      if (kind_ == ScalarKind::kReal && z.imag() != 0.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "real frame has a nonzero imaginary part at column " + std::to_string(j));
      }
    }
  }
  const double drift = max_norm_drift();
  if (norm_check == NormCheck::kStrict && drift > 1e-10) {
    throw Error(ErrorCode::kInvalidArgument,
                "columns are not unit norm (max drift " + std::to_string(drift) + ")");
  }
  if (norm_check == NormCheck::kWarn && drift > 1e-8) {
    info_.warnings.push_back("column normalization drifted by " + std::to_string(drift));
  }
}

double SensingMatrix::max_norm_drift() const {
  double drift = 0.0;
  for (Index j = 0; j < cols(); ++j) {
    drift = std::max(drift, std::abs(entries_.col(j).norm() - 1.0));
  }
  return drift;
}

void validate_support(std::span<const Index> support, Index n) {
  if (support.empty()) {
    throw Error(ErrorCode::kEmptySupport, "support is empty");
  }
  std::vector<Index> sorted(support.begin(), support.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || sorted.back() >= n) {
    throw Error(ErrorCode::kInvalidSupport, "support index out of range [0, " +
                                                std::to_string(n) + ")");
  }
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::kInvalidSupport, "support has duplicate indices");
  }
}

namespace {

Eigen::MatrixXcd gather_columns(const SensingMatrix& phi, std::span<const Index> support) {
  Eigen::MatrixXcd sub(phi.rows(), static_cast<Index>(support.size()));
  for (std::size_t l = 0; l < support.size(); ++l) {
    sub.col(static_cast<Index>(l)) = phi.column(support[l]);
  }
  return sub;
}

constexpr Index kDenseBlockSize = 64;

template <typename Matrix>
double power_iteration(const Matrix& b, const SpectralOptions& opts) {
  using Vector = Eigen::Matrix<typename Matrix::Scalar, Eigen::Dynamic, 1>;
  const Index n = b.rows();
  if (n == 0) return 0.0;
  if (b.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  Vector v = Vector::Ones(n);
  v(0) += 1e-6;
  v.normalize();

  double lambda_prev = 0.0;
  double delta_prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iters; ++it) {
    Vector w = b * v;
    double w_norm = w.norm();
    if (w_norm == 0.0) {
      // Start vector landed in the null space; move to a basis vector.
      v = Vector::Unit(n, it % n);
      continue;
    }
    const double lambda = std::real(v.dot(w));
    if (it > 0) {
      const double delta = std::abs(lambda - lambda_prev);
      const double tol = opts.rel_tol * std::max(lambda, std::sqrt(std::max(lambda, 0.0)));
      if (delta == 0.0) return lambda;
      if (delta <= tol) {
        const double ratio = delta / delta_prev;
        if (ratio < 1.0 && delta * ratio / (1.0 - ratio) <= tol) return lambda;
      }
      delta_prev = delta;
    }
    lambda_prev = lambda;
    v = w / w_norm;
  }
  throw Error(ErrorCode::kNonConvergence,
              "power iteration did not converge in " + std::to_string(opts.max_iters) +
                  " iterations");
}

template <typename Matrix>
double spectral_norm_impl(const Matrix& a, const SpectralOptions& opts) {
  if (!(opts.rel_tol > 0.0 && opts.rel_tol <= 1e-3) || opts.max_iters < 10) {
    throw Error(ErrorCode::kInvalidArgument, "spectral_norm needs rel_tol in (0, 1e-3] and "
                                             "max_iters >= 10");
  }
  if (!a.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "spectral_norm input is not finite");
  }
  using Square = Eigen::Matrix<typename Matrix::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Square gram = a.cols() <= a.rows() ? Square(a.adjoint() * a) : Square(a * a.adjoint());
  return std::sqrt(std::max(power_iteration(gram, opts), 0.0));
}

}  // namespace

double psd_top_eigenvalue(const Eigen::MatrixXcd& b, const SpectralOptions& opts) {
  return power_iteration(b, opts);
}

double psd_top_eigenvalue(const Eigen::MatrixXd& b, const SpectralOptions& opts) {
  return power_iteration(b, opts);
}

double spectral_norm(const Eigen::MatrixXcd& a, const SpectralOptions& opts) {
  return spectral_norm_impl(a, opts);
}

double spectral_norm(const Eigen::MatrixXd& a, const SpectralOptions& opts) {
  return spectral_norm_impl(a, opts);
}

Eigen::MatrixXcd hollow_gram(const SensingMatrix& phi) {
  Eigen::MatrixXcd g = phi.entries().adjoint() * phi.entries();
  g.diagonal().setZero();
  return g;
}

Eigen::VectorXd column_coherences(const SensingMatrix& phi, Index j) {
  if (j < 0 || j >= phi.cols()) {
    throw Error(ErrorCode::kInvalidSupport, "column index out of range");
  }
  Eigen::VectorXd c = (phi.entries().adjoint() * phi.column(j)).cwiseAbs();
  c(j) = 0.0;
  return c;
}

CoherenceProfile coherence_profile(const SensingMatrix& phi, double inv_tol,
                                   const SpectralOptions& spectral) {
  if (!(inv_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "inv_tol must be positive");
  }
  const Index m = phi.rows();
  const Index n = phi.cols();
  CoherenceProfile profile;
  profile.mu_bar_sq_per_column.assign(static_cast<std::size_t>(n), 0.0);
  profile.coherence_invariant = true;

  const Eigen::MatrixXd real_entries = phi.is_real() ? phi.real_part() : Eigen::MatrixXd();
  constexpr Index kBlock = 256;
  std::vector<double> reference;
  std::vector<double> sorted;
  Eigen::MatrixXd magnitudes;
  for (Index j0 = 0; j0 < n; j0 += kBlock) {
    const Index width = std::min(kBlock, n - j0);
    if (phi.is_real()) {
      magnitudes = (real_entries.transpose() * real_entries.middleCols(j0, width)).cwiseAbs();
    } else {
      magnitudes =
          (phi.entries().adjoint() * phi.entries().middleCols(j0, width)).cwiseAbs();
    }
    for (Index c = 0; c < width; ++c) {
      const Index j = j0 + c;
      sorted.clear();
      double energy = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (i == j) continue;
        const double g = magnitudes(i, c);
        profile.mu = std::max(profile.mu, g);
        energy += g * g;
        sorted.push_back(g);
      }
      profile.off_diagonal_energy += energy;
      profile.mu_bar_sq_per_column[static_cast<std::size_t>(j)] =
          n > 1 ? energy / static_cast<double>(n - 1) : 0.0;
      std::sort(sorted.begin(), sorted.end());
      if (j == 0) {
        reference = sorted;
      } else if (profile.coherence_invariant) {
        for (std::size_t t = 0; t < sorted.size(); ++t) {
          if (std::abs(sorted[t] - reference[t]) > inv_tol) {
            profile.coherence_invariant = false;
            break;
          }
        }
      }
    }
  }
  profile.mu_bar_sq = *std::max_element(profile.mu_bar_sq_per_column.begin(),
                                        profile.mu_bar_sq_per_column.end());

  if (phi.is_real()) {
    profile.spectral_norm = spectral_norm(real_entries, spectral);
    Eigen::MatrixXd frame_op = real_entries * real_entries.transpose();
    frame_op.diagonal().array() -= static_cast<double>(n) / static_cast<double>(m);
    profile.tight_frame_defect = spectral_norm(frame_op, spectral);
  } else {
    profile.spectral_norm = spectral_norm(phi.entries(), spectral);
    Eigen::MatrixXcd frame_op = phi.entries() * phi.entries().adjoint();
    frame_op.diagonal().array() -= static_cast<double>(n) / static_cast<double>(m);
    profile.tight_frame_defect = spectral_norm(frame_op, spectral);
  }
  return profile;
}

double hollow_block_norm(const Eigen::MatrixXcd& block, const SpectralOptions& opts) {
  if (block.rows() <= 1) return block.rows() == 1 ? std::abs(block(0, 0)) : 0.0;
  if (block.rows() == 2) {
    // Eigenvalues of [[d0, g], [conj g, d1]] in closed form.
    const double d0 = block(0, 0).real();
    const double d1 = block(1, 1).real();
    const double mean = 0.5 * (d0 + d1);
    const double radius = std::hypot(0.5 * (d0 - d1), std::abs(block(0, 1)));
    return std::max(std::abs(mean + radius), std::abs(mean - radius));
  }
  // Support blocks are small and their top eigenvalues often nearly tie,
  // which stalls power iteration; a direct Hermitian solve is exact enough.
  if (block.rows() <= kDenseBlockSize) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block, Eigen::EigenvaluesOnly);
    if (solver.info() == Eigen::Success) return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  const Eigen::MatrixXcd square = block.adjoint() * block;
  return std::sqrt(std::max(psd_top_eigenvalue(square, opts), 0.0));
}

double restricted_gram_norm(const SensingMatrix& phi, std::span<const Index> support,
                            const SpectralOptions& opts) {
  validate_support(support, phi.cols());
  const Eigen::MatrixXcd sub = gather_columns(phi, support);
  Eigen::MatrixXcd deviation = sub.adjoint() * sub;
  deviation.diagonal().array() -= 1.0;
  return hollow_block_norm(deviation, opts);
}

double sinc_statistic(const SensingMatrix& phi, std::span<const Index> support) {
  validate_support(support, phi.cols());
  if (static_cast<Index>(support.size()) >= phi.cols()) {
    throw Error(ErrorCode::kFullSupport, "SINC statistic needs a column outside the support");
  }
  const Eigen::MatrixXcd sub = gather_columns(phi, support);
  const Eigen::RowVectorXd sums = (sub.adjoint() * phi.entries()).cwiseAbs2().colwise().sum();
  std::unordered_set<Index> inside(support.begin(), support.end());
  double best = 0.0;
  for (Index i = 0; i < phi.cols(); ++i) {
    if (!inside.contains(i)) best = std::max(best, sums(i));
  }
  return best;
}

double column_sum_statistic(const SensingMatrix& phi, std::span<const Index> support,
                            Index j) {
  validate_support(support, phi.cols());
  if (j < 0 || j >= phi.cols()) {
    throw Error(ErrorCode::kInvalidSupport, "column index out of range");
  }
  if (std::find(support.begin(), support.end(), j) != support.end()) {
    throw Error(ErrorCode::kIndexInSupport,
                "column " + std::to_string(j) + " belongs to the support");
  }
  double sum = 0.0;
  for (const Index l : support) {
    sum += std::norm(phi.column(l).dot(phi.column(j)));
  }
  return sum;
}

SubsetEvaluation evaluate_subset(const SensingMatrix& phi, std::span<const Index> support,
                                 const SpectralOptions& opts) {
  SubsetEvaluation eval;
  eval.support.assign(support.begin(), support.end());
  std::sort(eval.support.begin(), eval.support.end());
  eval.delta = restricted_gram_norm(phi, eval.support, opts);
  eval.sinc = static_cast<Index>(support.size()) < phi.cols() ? sinc_statistic(phi, eval.support)
                                                              : 0.0;
  return eval;
}

SensingMatrix normalize_columns(Eigen::MatrixXcd raw, ScalarKind kind, FrameInfo info) {
  for (Index j = 0; j < raw.cols(); ++j) {
    const double norm = raw.col(j).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::kZeroColumn, "column " + std::to_string(j) + " has zero norm");
    }
    raw.col(j) /= norm;
  }
  return SensingMatrix(std::move(raw), kind, std::move(info));
}

SensingMatrix normalize_columns(const Eigen::MatrixXd& raw, FrameInfo info) {
  return normalize_columns(raw.cast<Complex>(), ScalarKind::kReal, std::move(info));
}

}  // namespace striplab
