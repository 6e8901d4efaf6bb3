#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace striplab {

using Index = Eigen::Index;
using Complex = std::complex<double>;

enum class ScalarKind { kReal, kComplex };

std::string to_string(ScalarKind kind);

struct FrameInfo {
  std::string family = "custom";
  std::map<std::string, double> params;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> warnings;
};

// How strictly the unit-norm column invariant is enforced on construction.
enum class NormCheck {
  kStrict,  // throw if any column norm is off by more than 1e-10
  kWarn,    // record a warning if any column norm is off by more than 1e-8
};

// Whether m > N is accepted. Only code_to_matrix, whose inputs may hold
// fewer codewords than their length, builds tall matrices.
enum class ShapeCheck { kWide, kAllowTall };

// Dense m x N dictionary Φ with unit-norm columns, stored column-major.
// Entries are always held as complex doubles; for ScalarKind::kReal the
// imaginary parts are exactly zero. Immutable after construction.
class SensingMatrix {
 public:
  SensingMatrix(Eigen::MatrixXcd entries, ScalarKind kind, FrameInfo info = {},
                NormCheck norm_check = NormCheck::kStrict,
                ShapeCheck shape_check = ShapeCheck::kWide);

  Index rows() const noexcept { return entries_.rows(); }
  Index cols() const noexcept { return entries_.cols(); }
  ScalarKind kind() const noexcept { return kind_; }
  bool is_real() const noexcept { return kind_ == ScalarKind::kReal; }

  const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
  auto column(Index j) const { return entries_.col(j); }
  Eigen::MatrixXd real_part() const { return entries_.real(); }

  const FrameInfo& info() const noexcept { return info_; }

  // Largest deviation |‖φ_j‖ - 1| over all columns.
  double max_norm_drift() const;

 private:
  Eigen::MatrixXcd entries_;
  ScalarKind kind_;
  FrameInfo info_;
};

struct CoherenceProfile {
  double mu = 0.0;
  std::vector<double> mu_bar_sq_per_column;
  double mu_bar_sq = 0.0;
  double spectral_norm = 0.0;
  bool coherence_invariant = false;
  double tight_frame_defect = 0.0;
  // Σ_{i≠j} |⟨φ_i, φ_j⟩|², accumulated from the column pass.
  double off_diagonal_energy = 0.0;
};

struct SubsetEvaluation {
  std::vector<Index> support;
  double delta = 0.0;
  double sinc = 0.0;
};

struct SpectralOptions {
  double rel_tol = 1e-10;
  int max_iters = 10'000;
};

// N x N matrix with entries ⟨φ_i, φ_j⟩ = φ_i^* φ_j off the diagonal and zero
// on it.
Eigen::MatrixXcd hollow_gram(const SensingMatrix& phi);

// Magnitudes |⟨φ_i, φ_j⟩| for all i, with entry j set to zero.
Eigen::VectorXd column_coherences(const SensingMatrix& phi, Index j);

// μ, μ̄², spectral norm, tight-frame defect and the coherence-invariance flag.
// Runs in O(N² m) time and O(N · block) memory; the full Gram is never formed.
CoherenceProfile coherence_profile(const SensingMatrix& phi,
                                   double inv_tol = 1e-9,
                                   const SpectralOptions& spectral = {});

// Largest singular value by power iteration on the smaller of A^*A and AA^*.
// Throws NonConvergence if the Rayleigh quotients have not settled within
// max_iters.
double spectral_norm(const Eigen::MatrixXcd& a, const SpectralOptions& opts = {});
double spectral_norm(const Eigen::MatrixXd& a, const SpectralOptions& opts = {});

// Largest eigenvalue of a Hermitian positive semidefinite matrix.
double psd_top_eigenvalue(const Eigen::MatrixXcd& b, const SpectralOptions& opts);
double psd_top_eigenvalue(const Eigen::MatrixXd& b, const SpectralOptions& opts);

// δ_I = ‖Φ_I^*Φ_I - Id‖₂.
double restricted_gram_norm(const SensingMatrix& phi, std::span<const Index> support,
                            const SpectralOptions& opts = {});

// Spectral norm of a Hermitian matrix with zero diagonal (the k x k hollow
// restricted Gram). Shared by restricted_gram_norm and the verification
// engine, which gathers blocks from a cached Gram.
double hollow_block_norm(const Eigen::MatrixXcd& block, const SpectralOptions& opts = {});

// max_{i ∉ I} Σ_{l ∈ I} |⟨φ_l, φ_i⟩|².
double sinc_statistic(const SensingMatrix& phi, std::span<const Index> support);

// Σ_{l ∈ I} |⟨φ_l, φ_j⟩|² for a column j outside I.
double column_sum_statistic(const SensingMatrix& phi, std::span<const Index> support,
                            Index j);

SubsetEvaluation evaluate_subset(const SensingMatrix& phi, std::span<const Index> support,
                                 const SpectralOptions& opts = {});

// Scales every column to unit Euclidean norm. Throws ZeroColumn.
SensingMatrix normalize_columns(Eigen::MatrixXcd raw, ScalarKind kind, FrameInfo info = {});
SensingMatrix normalize_columns(const Eigen::MatrixXd& raw, FrameInfo info = {});

// Throws InvalidSupport / EmptySupport unless `support` is a nonempty
// duplicate-free subset of [0, n).
void validate_support(std::span<const Index> support, Index n);

}  // namespace striplab
