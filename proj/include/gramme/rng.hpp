#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gramme {

/// Seeded generator with hand-rolled integer draws and shuffles so that
/// generated datasets are identical across standard library versions.
struct Rng {
  explicit Rng(std::uint64_t seed) : eng(seed) {}

  std::uint64_t u64() { return eng(); }

  /// Uniform in [0, 1).
  double unit() { return (eng() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = eng();
    } while (x >= limit);
    return x % n;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  std::mt19937_64 eng;
};

}  // namespace gramme
