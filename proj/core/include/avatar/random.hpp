#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace avatar {

// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// Seeded random stream. Draws are implemented on top of the raw 64-bit engine
// output rather than <random> distributions, so sequences are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  // Uniform double in [0, 1) with 53 bits of randomness.
  double uniform();

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  std::uint64_t next() { return engine_(); }

  // Independent stream for task `index`, derived from the construction seed
  // only (not from the current state), so it is stable under reordering.
  Rng substream(std::uint64_t index) const { return Rng(mix_seed(seed_, index)); }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace avatar
