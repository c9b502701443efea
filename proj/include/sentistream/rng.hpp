#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace sentistream {

// Seeded generator used everywhere randomness is needed. All derived draws
// (uniform reals, bounded ints, normals, shuffles) are implemented on top of
// the raw 64-bit stream so that a seed pins the entire output sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling keeps the
  // distribution exact for any span.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(gen_());  // full 64-bit range
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % span + 1) % span;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x > limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  // Box-Muller; two uniform draws per sample, no cached spare.
  double normal(double mean, double sigma) {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    shuffle(order);
    return order;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace sentistream
