#include "striplab/gf2.hpp"

#include <array>
#include <string>

#include "striplab/errors.hpp"

namespace striplab::gf2 {

namespace {

// Primitive polynomials over GF(2), indexed by degree (bit n set).
constexpr std::array<std::uint32_t, 21> kPrimitive = {
    0x0,       0x3,      0x7,      0xb,      0x13,     0x25,     0x43,
    0x89,      0x11d,    0x211,    0x409,    0x805,    0x1053,   0x201b,
    0x4443,    0x8003,   0x1002d,  0x20009,  0x40027,  0x80027,  0x100009,
};

}  // namespace

Field::Field(int n) : n_(n) {
  if (n < 1 || n >= static_cast<int>(kPrimitive.size())) {
    throw Error(ErrorCode::kInvalidArgument,
                "GF(2^n) supported for 1 <= n <= 20, got n=" + std::to_string(n));
  }
  modulus_ = kPrimitive[static_cast<std::size_t>(n)];
}

std::uint32_t Field::mul(std::uint32_t a, std::uint32_t b) const noexcept {
  std::uint32_t result = 0;
  const std::uint32_t top = std::uint32_t{1} << n_;
  while (b != 0) {
    if (b & 1U) result ^= a;
    b >>= 1;
    a <<= 1;
    if (a & top) a ^= modulus_;
  }
  return result;
}

std::uint32_t Field::pow(std::uint32_t a, std::uint64_t e) const noexcept {
  std::uint32_t result = 1;
  while (e != 0) {
    if (e & 1U) result = mul(result, a);
    a = mul(a, a);
    e >>= 1;
  }
  return result;
}

int Field::trace(std::uint32_t a) const noexcept {
  std::uint32_t sum = 0;
  std::uint32_t x = a;
  for (int i = 0; i < n_; ++i) {
    sum ^= x;
    x = mul(x, x);
  }
  return static_cast<int>(sum & 1U);
}

}  // namespace striplab::gf2
