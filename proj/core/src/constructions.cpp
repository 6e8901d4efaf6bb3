#include "striplab/constructions.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "striplab/errors.hpp"
#include "striplab/gf2.hpp"
#include "striplab/rng.hpp"

namespace striplab {

namespace {

std::int64_t require_param(const FamilySpec& request, const std::string& key) {
  const auto it = request.params.find(key);
  if (it == request.params.end()) {
    throw Error(ErrorCode::kInvalidArgument,
                "family '" + request.family + "' needs parameter --" + key);
  }
  return it->second;
}

std::uint64_t require_seed(const FamilySpec& request) {
  if (!request.seed) {
    throw Error(ErrorCode::kInvalidArgument,
                "family '" + request.family + "' is randomized and needs an explicit seed");
  }
  return *request.seed;
}

void require_shape(Index m, Index n) {
  if (m < 1 || m > n) {
    throw Error(ErrorCode::kInvalidArgument, "need 1 <= m <= N, got m=" + std::to_string(m) +
                                                 ", N=" + std::to_string(n));
  }
}

// e^{2πi·num/den} with num already reduced mod den, which keeps the phase
// argument small and the entries accurate to a few ulps.
Complex unit_root(std::int64_t num, std::int64_t den) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
  return std::polar(1.0, angle);
}

std::int64_t mod(std::int64_t a, std::int64_t p) {
  const std::int64_t r = a % p;
  return r < 0 ? r + p : r;
}

// Binary symmetric matrix of a bilinear form on F_2^n, one bitmask per row.
using BinaryForm = std::vector<std::uint32_t>;

BinaryForm form_matrix(const gf2::Field& field, auto&& bilinear) {
  const int n = field.degree();
  BinaryForm rows(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      if (bilinear(std::uint32_t{1} << i, std::uint32_t{1} << k)) {
        rows[static_cast<std::size_t>(i)] |= std::uint32_t{1} << k;
      }
    }
  }
  return rows;
}

// aᵀPa mod 4, with P binary symmetric and the sum taken over the integers.
int z4_quadratic(const BinaryForm& p, std::uint32_t a) {
  int diag = 0;
  int cross = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!((a >> i) & 1U)) continue;
    diag += static_cast<int>((p[i] >> i) & 1U);
    const std::uint32_t above = a & p[i] & ~((std::uint32_t{2} << i) - 1U);
    cross += std::popcount(above);
  }
  return (diag + 2 * cross) & 3;
}

constexpr std::array<Complex, 4> kPowersOfI = {Complex(1, 0), Complex(0, 1), Complex(-1, 0),
                                               Complex(0, -1)};

// Bit vector over F_2^{2^s}, one bit per field element.
using EvalVector = std::vector<std::uint64_t>;

bool eval_bit(const EvalVector& v, std::uint32_t x) { return (v[x >> 6] >> (x & 63U)) & 1U; }

// Incremental GF(2) elimination; insert() returns false for dependent vectors.
class Gf2Span {
 public:
  bool insert(EvalVector v) {
    for (const auto& [pivot, row] : rows_) {
      if ((v[pivot >> 6] >> (pivot & 63U)) & 1U) {
        for (std::size_t w = 0; w < v.size(); ++w) v[w] ^= row[w];
      }
    }
    for (std::size_t w = 0; w < v.size(); ++w) {
      if (v[w] != 0) {
        const std::size_t pivot = w * 64 + static_cast<std::size_t>(std::countr_zero(v[w]));
        rows_.emplace_back(pivot, std::move(v));
        return true;
      }
    }
    return false;
  }

 private:
  std::vector<std::pair<std::size_t, EvalVector>> rows_;
};

}  // namespace

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

SensingMatrix build_gaussian(Index m, Index n, std::uint64_t seed) {
  require_shape(m, n);
  CounterRng rng(seed);
  Eigen::MatrixXd raw(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) raw(i, j) = rng.normal();
  }
  FrameInfo info;
  info.family = "gaussian";
  info.params = {{"m", static_cast<double>(m)}, {"N", static_cast<double>(n)}};
  info.seed = seed;
  return normalize_columns(raw, std::move(info));
}

SensingMatrix build_random_harmonic(Index m, Index n, std::uint64_t seed) {
  require_shape(m, n);
  CounterRng rng(seed);
  const double keep = static_cast<double>(m) / static_cast<double>(n);
  std::vector<std::int64_t> rows;
  for (std::int64_t j = 1; j <= n; ++j) {
    if (rng.bernoulli(keep)) rows.push_back(j);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptySelection,
                "Bernoulli row selection kept no rows; retry with another seed");
  }
  const auto selected = static_cast<Index>(rows.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(selected));
  Eigen::MatrixXcd entries(selected, n);
  for (Index col = 0; col < n; ++col) {
    const std::int64_t k = col + 1;
    for (Index r = 0; r < selected; ++r) {
      entries(r, col) = scale * unit_root(mod(rows[static_cast<std::size_t>(r)] * k, n), n);
    }
  }
  FrameInfo info;
  info.family = "random-harmonic";
  info.params = {{"m", static_cast<double>(m)},
                 {"N", static_cast<double>(n)},
                 {"M", static_cast<double>(selected)}};
  info.seed = seed;
  return SensingMatrix(std::move(entries), ScalarKind::kComplex, std::move(info));
}

SensingMatrix build_chirp(Index m) {
  if (!is_prime(m)) {
    throw Error(ErrorCode::kNotPrime, "chirp frames need prime m, got " + std::to_string(m));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXcd entries(m, m * m);
  for (std::int64_t a = 1; a <= m; ++a) {
    for (std::int64_t b = 1; b <= m; ++b) {
      const Index col = (a - 1) * m + (b - 1);
      for (std::int64_t t = 1; t <= m; ++t) {
        entries(t - 1, col) = scale * unit_root(mod(b * t * t + a * t, m), m);
      }
    }
  }
  FrameInfo info;
  info.family = "chirp";
  info.params = {{"m", static_cast<double>(m)}};
  return SensingMatrix(std::move(entries), ScalarKind::kComplex, std::move(info));
}

SensingMatrix build_simplex_etf(Index m) {
  if (m < 2) {
    throw Error(ErrorCode::kInvalidArgument, "simplex ETF needs m >= 2");
  }
  // Row k-1 is the Helmert vector (1, ..., 1, -k, 0, ...)/√(k(k+1)), an
  // orthonormal basis of the complement of the all-ones vector in R^{m+1}.
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(m, m + 1);
  for (Index k = 1; k <= m; ++k) {
    const double norm = std::sqrt(static_cast<double>(k * (k + 1)));
    for (Index i = 0; i < k; ++i) raw(k - 1, i) = 1.0 / norm;
    raw(k - 1, k) = -static_cast<double>(k) / norm;
  }
  FrameInfo info;
  info.family = "simplex-etf";
  info.params = {{"m", static_cast<double>(m)}};
  return normalize_columns(raw, std::move(info));
}

EtfReport validate_etf(const SensingMatrix& phi, double tol) {
  EtfReport report;
  const auto m = static_cast<double>(phi.rows());
  const auto n = static_cast<double>(phi.cols());
  report.degenerate = phi.rows() == phi.cols();
  report.welch_value = report.degenerate ? 0.0 : std::sqrt((n - m) / (m * (n - 1.0)));
  for (Index j = 0; j < phi.cols(); ++j) {
    report.max_norm_deviation =
        std::max(report.max_norm_deviation, std::abs(phi.column(j).norm() - 1.0));
  }
  const Eigen::MatrixXcd gram = phi.entries().adjoint() * phi.entries();
  for (Index j = 0; j < phi.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      report.max_coherence_deviation = std::max(report.max_coherence_deviation,
                                                 std::abs(std::abs(gram(i, j)) - report.welch_value));
    }
  }
  report.is_etf = !report.degenerate && report.max_norm_deviation <= tol &&
                  report.max_coherence_deviation <= tol;
  return report;
}

SensingMatrix code_to_matrix(const std::vector<std::string>& codewords) {
  if (codewords.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one codeword");
  }
  const std::size_t length = codewords.front().size();
  if (length == 0) {
    throw Error(ErrorCode::kInvalidArgument, "codewords must be nonempty");
  }
  std::set<std::string> seen;
  for (const auto& word : codewords) {
    if (word.size() != length) {
      throw Error(ErrorCode::kLengthMismatch, "codeword lengths " + std::to_string(length) +
                                                  " and " + std::to_string(word.size()));
    }
    if (word.find_first_not_of("01") != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "codeword '" + word + "' is not binary");
    }
    if (!seen.insert(word).second) {
      throw Error(ErrorCode::kDuplicateCodeword, "codeword '" + word + "' repeats");
    }
  }
  const auto m = static_cast<Index>(length);
  const auto n = static_cast<Index>(codewords.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXcd entries(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) {
      entries(i, j) = codewords[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] == '0'
                          ? scale
                          : -scale;
    }
  }
  FrameInfo info;
  info.family = "code";
  info.params = {{"m", static_cast<double>(m)}, {"N", static_cast<double>(n)}};
  return SensingMatrix(std::move(entries), ScalarKind::kReal, std::move(info), NormCheck::kStrict,
                       ShapeCheck::kAllowTall);
}

double code_width(const std::vector<std::string>& codewords) {
  double width = 0.0;
  for (std::size_t a = 0; a < codewords.size(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      if (codewords[a].size() != codewords[b].size()) {
        throw Error(ErrorCode::kLengthMismatch, "codewords differ in length");
      }
      std::size_t distance = 0;
      for (std::size_t i = 0; i < codewords[a].size(); ++i) {
        distance += codewords[a][i] != codewords[b][i] ? 1 : 0;
      }
      width = std::max(width, std::abs(static_cast<double>(distance) -
                                        0.5 * static_cast<double>(codewords[a].size())));
    }
  }
  return width;
}

SensingMatrix build_delsarte_goethals(int s, int r, std::uint64_t column_budget) {
  if (s < 1) {
    throw Error(ErrorCode::kInvalidArgument, "Delsarte-Goethals frames need s >= 1");
  }
  if (r < 0 || r >= s) {
    throw Error(ErrorCode::kInvalidRank, "need 0 <= r <= s-1, got s=" + std::to_string(s) +
                                             ", r=" + std::to_string(r));
  }
  const int n = 2 * s + 2;
  const int log_cols = (r + 2) * n - r;
  if (log_cols >= 63 || (std::uint64_t{1} << log_cols) > column_budget) {
    throw Error(ErrorCode::kSizeOverBudget,
                "DG(" + std::to_string(s) + "," + std::to_string(r) + ") has 2^" +
                    std::to_string(log_cols) + " columns, over the budget of " +
                    std::to_string(column_budget));
  }
  const gf2::Field field(n);

  // Generators of the form subspace: slot 0 carries Tr(z·xy) (the Kerdock
  // forms), slot j >= 1 carries Tr(z·(x^{2^j}y + xy^{2^j})). Slot r keeps
  // only the low n - r coordinates of z so the set has 2^{(r+1)n - r} forms.
  std::vector<BinaryForm> generators;
  for (int slot = 0; slot <= r; ++slot) {
    const int bits = (slot == r && r > 0) ? n - r : n;
    for (int l = 0; l < bits; ++l) {
      const std::uint32_t z = std::uint32_t{1} << l;
      if (slot == 0) {
        generators.push_back(form_matrix(field, [&](std::uint32_t x, std::uint32_t y) {
          return field.trace(field.mul(z, field.mul(x, y)));
        }));
      } else {
        const std::uint64_t e = std::uint64_t{1} << slot;
        generators.push_back(form_matrix(field, [&](std::uint32_t x, std::uint32_t y) {
          const std::uint32_t t = field.mul(field.pow(x, e), y) ^ field.mul(x, field.pow(y, e));
          return field.trace(field.mul(z, t));
        }));
      }
    }
  }

  const Index m = Index{1} << n;
  const Index forms = Index{1} << generators.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXcd entries(m, forms * m);
  std::vector<int> quadratic(static_cast<std::size_t>(m));
  BinaryForm p(static_cast<std::size_t>(n));
  for (Index idx = 0; idx < forms; ++idx) {
    std::fill(p.begin(), p.end(), 0U);
    for (std::size_t g = 0; g < generators.size(); ++g) {
      if ((idx >> g) & 1) {
        for (std::size_t row = 0; row < p.size(); ++row) p[row] ^= generators[g][row];
      }
    }
    for (Index a = 0; a < m; ++a) {
      quadratic[static_cast<std::size_t>(a)] = z4_quadratic(p, static_cast<std::uint32_t>(a));
    }
    for (Index b = 0; b < m; ++b) {
      const Index col = idx * m + b;
      for (Index a = 0; a < m; ++a) {
        const int phase = (quadratic[static_cast<std::size_t>(a)] +
                           2 * gf2::parity(static_cast<std::uint64_t>(a & b))) & 3;
        entries(a, col) = scale * kPowersOfI[static_cast<std::size_t>(phase)];
      }
    }
  }
  FrameInfo info;
  info.family = "delsarte-goethals";
  info.params = {{"s", static_cast<double>(s)},
                 {"r", static_cast<double>(r)},
                 {"m", static_cast<double>(m)},
                 {"N", static_cast<double>(entries.cols())}};
  return SensingMatrix(std::move(entries), ScalarKind::kComplex, std::move(info));
}

SensingMatrix build_reed_muller(int s, int t, std::uint64_t column_budget) {
  if (s < 1 || t < 1) {
    throw Error(ErrorCode::kInvalidArgument, "Reed-Muller frames need s >= 1 and t >= 1");
  }
  const int log_cols = t * (1 + s);
  if (s > 20 || log_cols >= 63 || (std::uint64_t{1} << log_cols) > column_budget) {
    throw Error(ErrorCode::kSizeOverBudget,
                "RM(" + std::to_string(s) + "," + std::to_string(t) + ") has 2^" +
                    std::to_string(log_cols) + " columns, over the budget of " +
                    std::to_string(column_budget));
  }
  const int forms_needed = log_cols - s;
  const gf2::Field field(s);
  const auto m = static_cast<std::uint32_t>(field.size());
  const std::size_t words = (m + 63) / 64;

  Gf2Span span;
  // Affine functions first, so selected quadratics are independent modulo them.
  for (int i = 0; i <= s; ++i) {
    EvalVector v(words, 0);
    for (std::uint32_t x = 0; x < m; ++x) {
      const bool bit = i == s ? true : ((x >> i) & 1U);
      if (bit) v[x >> 6] |= std::uint64_t{1} << (x & 63U);
    }
    span.insert(std::move(v));
  }
  // Quadratic forms Tr(z·x^{2^j + 1}) for j = 1, 2, ... in order; any sum of
  // forms with j <= t has symplectic rank >= s - 2t.
  std::vector<EvalVector> quadratics;
  for (int j = 1; j < s && static_cast<int>(quadratics.size()) < forms_needed; ++j) {
    const std::uint64_t e = (std::uint64_t{1} << j) + 1;
    for (int l = 0; l < s && static_cast<int>(quadratics.size()) < forms_needed; ++l) {
      const std::uint32_t z = std::uint32_t{1} << l;
      EvalVector v(words, 0);
      for (std::uint32_t x = 0; x < m; ++x) {
        if (field.trace(field.mul(z, field.pow(x, e)))) v[x >> 6] |= std::uint64_t{1} << (x & 63U);
      }
      if (span.insert(v)) quadratics.push_back(std::move(v));
    }
  }
  if (static_cast<int>(quadratics.size()) < forms_needed) {
    throw Error(ErrorCode::kInvalidArgument,
                "RM(" + std::to_string(s) + "," + std::to_string(t) + ") needs " +
                    std::to_string(forms_needed) + " independent quadratic forms, found " +
                    std::to_string(quadratics.size()));
  }

  const auto rows = static_cast<Index>(m);
  const Index forms = Index{1} << forms_needed;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXcd entries(rows, forms * rows);
  EvalVector word(words);
  for (Index idx = 0; idx < forms; ++idx) {
    std::fill(word.begin(), word.end(), 0);
    for (int g = 0; g < forms_needed; ++g) {
      if ((idx >> g) & 1) {
        for (std::size_t w = 0; w < words; ++w) word[w] ^= quadratics[static_cast<std::size_t>(g)][w];
      }
    }
    for (Index b = 0; b < rows; ++b) {
      const Index col = idx * rows + b;
      for (std::uint32_t x = 0; x < m; ++x) {
        const bool bit = eval_bit(word, x) != static_cast<bool>(gf2::parity(x & static_cast<std::uint32_t>(b)));
        entries(static_cast<Index>(x), col) = Complex(bit ? -scale : scale, 0.0);
      }
    }
  }
  FrameInfo info;
  info.family = "reed-muller";
  info.params = {{"s", static_cast<double>(s)},
                 {"t", static_cast<double>(t)},
                 {"m", static_cast<double>(rows)},
                 {"N", static_cast<double>(entries.cols())}};
  if (4 * t >= s) {
    info.warnings.push_back("t >= s/4: the coherence bound is outside its stated range");
  }
  return SensingMatrix(std::move(entries), ScalarKind::kReal, std::move(info));
}

std::vector<std::int64_t> polynomial_rows(std::int64_t p, const std::vector<std::int64_t>& coeffs,
                                          Index m) {
  std::vector<std::int64_t> rows;
  rows.reserve(static_cast<std::size_t>(m));
  for (std::int64_t x = 1; x <= m; ++x) {
    std::int64_t acc = 0;
    for (const std::int64_t c : coeffs) acc = mod(acc * mod(x, p) + mod(c, p), p);
    rows.push_back(acc);
  }
  return rows;
}

SensingMatrix build_sub_fourier(std::int64_t p, int degree, const std::vector<std::int64_t>& coeffs,
                                Index m) {
  if (!is_prime(p)) {
    throw Error(ErrorCode::kNotPrime, "sub-Fourier frames need prime p, got " + std::to_string(p));
  }
  if (p == 2) {
    throw Error(ErrorCode::kRangeError, "sub-Fourier frames need p > 2");
  }
  if (degree <= 2) {
    throw Error(ErrorCode::kDegreeTooSmall, "polynomial degree must exceed 2, got " +
                                                std::to_string(degree));
  }
  if (coeffs.size() != static_cast<std::size_t>(degree) + 1 || mod(coeffs.front(), p) == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "need " + std::to_string(degree + 1) +
                    " coefficients with a leading coefficient nonzero mod p");
  }
  if (m < 1 || m > p) {
    throw Error(ErrorCode::kRangeError, "need 1 <= m <= p, got m=" + std::to_string(m));
  }
  FrameInfo info;
  info.family = "sub-fourier";
  info.params = {{"p", static_cast<double>(p)},
                 {"d", static_cast<double>(degree)},
                 {"m", static_cast<double>(m)}};
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    info.params["coeff" + std::to_string(i)] = static_cast<double>(coeffs[i]);
  }
  const double lower = std::pow(static_cast<double>(p), 1.0 / (degree - 1));
  if (static_cast<double>(m) < lower) {
    info.warnings.push_back("RangeWarning: m=" + std::to_string(m) + " is below p^{1/(d-1)}=" +
                            std::to_string(lower));
  }
  const std::vector<std::int64_t> rows = polynomial_rows(p, coeffs, m);
  if (std::set<std::int64_t>(rows.begin(), rows.end()).size() != rows.size()) {
    info.warnings.push_back(
        "CollisionWarning: f(1..m) mod p has repeated residues; rows kept as a multiset");
  }
  Eigen::MatrixXcd raw(m, p);
  for (Index r = 0; r < m; ++r) {
    for (std::int64_t k = 0; k < p; ++k) {
      raw(r, k) = unit_root(mod(rows[static_cast<std::size_t>(r)] * k, p), p);
    }
  }
  return normalize_columns(std::move(raw), ScalarKind::kComplex, std::move(info));
}

SensingMatrix build_family(const FamilySpec& request) {
  const std::string& f = request.family;
  if (f == "gaussian") {
    return build_gaussian(require_param(request, "m"), require_param(request, "n"), require_seed(request));
  }
  if (f == "random-harmonic") {
    return build_random_harmonic(require_param(request, "m"), require_param(request, "n"),
                                 require_seed(request));
  }
  if (f == "chirp") return build_chirp(require_param(request, "m"));
  if (f == "simplex-etf") return build_simplex_etf(require_param(request, "m"));
  if (f == "reed-muller") {
    return build_reed_muller(static_cast<int>(require_param(request, "s")),
                             static_cast<int>(require_param(request, "t")), request.column_budget);
  }
  if (f == "delsarte-goethals") {
    return build_delsarte_goethals(static_cast<int>(require_param(request, "s")),
                                   static_cast<int>(require_param(request, "r")), request.column_budget);
  }
  if (f == "sub-fourier") {
    return build_sub_fourier(require_param(request, "p"), static_cast<int>(require_param(request, "d")),
                             request.coeffs, require_param(request, "m"));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown family '" + f + "'");
}

}  // namespace striplab
