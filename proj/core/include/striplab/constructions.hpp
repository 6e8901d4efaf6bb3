#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "striplab/frame.hpp"

namespace striplab {

inline constexpr std::uint64_t kDefaultColumnBudget = std::uint64_t{1} << 20;

// Family selector plus integer parameters, as accepted by build_family.
struct FamilySpec {
  std::string family;
  std::map<std::string, std::int64_t> params;
  std::vector<std::int64_t> coeffs;  // sub-fourier polynomial, leading coefficient first
  std::optional<std::uint64_t> seed;
  std::uint64_t column_budget = kDefaultColumnBudget;
};

// Builds any generated family by name: gaussian, random-harmonic, chirp,
// simplex-etf, reed-muller, delsarte-goethals, sub-fourier. Randomized
// families require `seed`. etf-import is file based and handled by the CLI.
SensingMatrix build_family(const FamilySpec& request);

SensingMatrix build_gaussian(Index m, Index n, std::uint64_t seed);

// √(N/|M|)·F_M for the unitary N-point DFT F[j][k] = e^{2πijk/N}/√N with
// rows j ∈ {1..N} kept independently with probability m/N. The realized
// |M| is stored as params["M"]. Throws EmptySelection if no row survives.
SensingMatrix build_random_harmonic(Index m, Index n, std::uint64_t seed);

// Φ[t, a·m + b] = e^{2πi(bt² + at)/m}/√m for t, a, b ∈ {1..m}; column
// (a, b) sits at zero-based index (a-1)·m + (b-1). Throws NotPrime.
SensingMatrix build_chirp(Index m);

// m x (m+1) real frame of regular-simplex directions (pairwise ⟨φ_i, φ_j⟩ = -1/m).
SensingMatrix build_simplex_etf(Index m);

struct EtfReport {
  bool is_etf = false;
  bool degenerate = false;  // N == m: the Welch value is 0 and nothing is equiangular
  double welch_value = 0.0;
  double max_norm_deviation = 0.0;
  double max_coherence_deviation = 0.0;
};

EtfReport validate_etf(const SensingMatrix& phi, double tol = 1e-8);

// Columns are bipolar images (0 → +1, 1 → -1) of the codewords scaled by
// 1/√m. Each word is a string over {'0','1'}.
SensingMatrix code_to_matrix(const std::vector<std::string>& codewords);

// Code width w = max |d(x_i, x_j) - m/2| over distinct pairs.
double code_width(const std::vector<std::string>& codewords);

// Z4-valued Delsarte-Goethals frame with m = 2^{2s+2} rows and
// N = 2^{2(s+1)(r+2) - r} columns: φ_{P,b}(a) = i^{aᵀPa + 2bᵀa}/√m for
// a, b ∈ F_2^{n}, n = 2s + 2, with P drawn from an F_2-linear subspace of the
// DG(n, r) set of binary symmetric forms.
SensingMatrix build_delsarte_goethals(int s, int r,
                                      std::uint64_t column_budget = kDefaultColumnBudget);

// Real ±1/√m frame from a second-order Reed-Muller subcode with m = 2^s rows
// and N = 2^{t(1+s)} columns. A warning is attached when t >= s/4.
SensingMatrix build_reed_muller(int s, int t,
                                std::uint64_t column_budget = kDefaultColumnBudget);

// Rows f(1), ..., f(m) mod p of the p-point DFT, columns unit-normalized.
// `coeffs` lists f's coefficients from the leading one down to the constant.
SensingMatrix build_sub_fourier(std::int64_t p, int degree,
                                const std::vector<std::int64_t>& coeffs, Index m);

// Residues f(1), ..., f(m) mod p by Horner's rule.
std::vector<std::int64_t> polynomial_rows(std::int64_t p, const std::vector<std::int64_t>& coeffs,
                                          Index m);

bool is_prime(std::int64_t n);

}  // namespace striplab
