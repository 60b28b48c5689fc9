#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace iclscope {

// Counter-based SplitMix64 stream. Draw k of the stream keyed by `key` is
//   mix64(mix64(key) + (k + 1) * 0x9E3779B97F4A7C15)
// so every value is a pure function of (key, k). See docs/rng.md.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Combines a parent key with a child index into a new stream key.
std::uint64_t derive_key(std::uint64_t key, std::uint64_t index) noexcept;

// 64-bit FNV-1a; used to key streams by string labels.
std::uint64_t fnv1a64(std::string_view text) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t key) noexcept : base_(mix64(key)) {}
  Rng(std::uint64_t key, std::uint64_t index) noexcept : Rng(derive_key(key, index)) {}

  std::uint64_t next_u64() noexcept;
  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  // Uniform in [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  // Unbiased integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  // Standard normal via Box-Muller, consuming exactly two draws.
  double gaussian() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    // Fisher-Yates from the back.
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace iclscope
