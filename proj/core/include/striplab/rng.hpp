#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace striplab {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: the stream for (key, stream_id) is a pure function
// of those two words, so trial t of a Monte Carlo run can be regenerated
// without touching trials 0..t-1. All distributions below are implemented
// here rather than through <random> so that outputs are bit-identical across
// standard libraries.
class CounterRng {
 public:
  CounterRng(std::uint64_t key, std::uint64_t stream_id = 0) noexcept
      : key_(mix64(key ^ mix64(stream_id ^ 0x5851f42d4c957f2dULL))) {}

  std::uint64_t next_u64() noexcept {
    return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in [0, bound) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % bound;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Standard normal via Box-Muller; both variates are used.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  int sign() noexcept { return (next_u64() >> 63) ? -1 : 1; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Draws the first `count` entries of a uniformly random permutation of
// [0, n) by partial Fisher-Yates. Only the displaced positions are stored,
// so the cost is O(count^2) time and O(count) memory regardless of n.
template <typename Index>
void sample_prefix(CounterRng& rng, Index n, std::span<Index> out) {
  std::vector<std::pair<Index, Index>> swapped;
  swapped.reserve(out.size());
  auto value_at = [&](Index pos) {
    for (const auto& [p, v] : swapped) {
      if (p == pos) return v;
    }
    return pos;
  };
  auto set_at = [&](Index pos, Index val) {
    for (auto& [p, v] : swapped) {
      if (p == pos) {
        v = val;
        return;
      }
    }
    swapped.emplace_back(pos, val);
  };
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Index pos = static_cast<Index>(i);
    const Index pick =
        pos + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - pos)));
    const Index a = value_at(pos);
    const Index b = value_at(pick);
    out[i] = b;
    set_at(pick, a);
    set_at(pos, b);
  }
}

}  // namespace striplab
