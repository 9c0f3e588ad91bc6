#ifndef DEEPMPR_RNG_HPP_
#define DEEPMPR_RNG_HPP_

#include <cstdint>
#include <random>

namespace deepmpr {

using Rng = std::mt19937_64;

// Independent random streams, one per simulator subsystem.
enum class Stream : std::uint64_t {
  kMobility = 1,
  kRadio = 2,
  kHello = 3,
  kFlow = 4,
  kPolicy = 5,
  kTopology = 6,
};

// splitmix64 finalizer; used to derive well-separated sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, Stream stream) {
  return mix_seed(mix_seed(root) ^ (static_cast<std::uint64_t>(stream) * 0xd1342543de82ef95ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix_seed(mix_seed(root) + mix_seed(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t root, Stream stream) { return Rng(derive_seed(root, stream)); }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

}  // namespace deepmpr

#endif  // DEEPMPR_RNG_HPP_
