#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace psqe {

using cxd = std::complex<double>;

// Global numeric tolerances. State-level identities hold to 1e-10 in double
// precision for every register size this library supports; eigensystem
// results are a bit looser because they go through an iterative solver.
namespace tol {
inline constexpr double state = 1e-10;
inline constexpr double unitary = 1e-9;
inline constexpr double eigen = 1e-9;
inline constexpr double reconstruct = 1e-8;
}  // namespace tol

// splitmix64 finalizer; derives independent substream seeds from
// (seed, index) so sharded workers stay reproducible.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded random stream. Every stochastic operation in the library takes one
// of these explicitly; nothing draws from a global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix_seed(seed, index));
  }

  double uniform() { return unit_(gen_); }
  double gaussian() { return normal_(gen_); }
  int bit() { return uniform() < 0.5 ? 0 : 1; }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace psqe
