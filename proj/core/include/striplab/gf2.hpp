#pragma once

#include <cstdint>

namespace striplab::gf2 {

// Arithmetic in GF(2^n) with elements as bit patterns in the polynomial
// basis {1, x, ..., x^{n-1}} modulo a fixed primitive polynomial.
class Field {
 public:
  // Supports 1 <= n <= 20.
  explicit Field(int n);

  int degree() const noexcept { return n_; }
  std::uint32_t size() const noexcept { return std::uint32_t{1} << n_; }
  std::uint32_t modulus() const noexcept { return modulus_; }

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const noexcept;
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const noexcept;
  // Absolute trace to GF(2); returns 0 or 1.
  int trace(std::uint32_t a) const noexcept;

 private:
  int n_;
  std::uint32_t modulus_;
};

inline int parity(std::uint64_t v) noexcept { return __builtin_parityll(v); }

}  // namespace striplab::gf2
