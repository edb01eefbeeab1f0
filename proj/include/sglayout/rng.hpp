#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace sglayout {

// One splitmix64 step. Used for seed expansion and stream derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent stream seed from (seed, key), e.g. one RNG per scene.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key);

// PCG32 (O'Neill). The algorithm is fixed so streams are identical across
// runs and platforms; golden vectors are frozen in the test suite.
class Rng {
 public:
  static constexpr std::uint64_t kDefaultStream = 0xda3e39cb94b95bdbULL;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = kDefaultStream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Box-Muller; consumes exactly two uniform draws per call.
  double normal(double mean, double sigma);

  // Unbiased integer in [0, n); n must be > 0.
  std::uint32_t uniform_below(std::uint32_t n);

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = uniform_below(static_cast<std::uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

}  // namespace sglayout
