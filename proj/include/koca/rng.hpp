#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace koca {

// splitmix64 finalizer; used only to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag) noexcept {
  return mix64(mix64(root) ^ (tag * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

/// Tags for the independent substreams of one replication.
enum class Substream : std::uint64_t { Topology = 1, Coins = 2, Channel = 3 };

/// Seeded Mersenne Twister with a portable [0,1) mapping, so draws are
/// identical across standard library implementations.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const noexcept { return seed_; }

  RandomStream substream(std::uint64_t tag) const { return RandomStream(derive_seed(seed_, tag)); }
  RandomStream substream(Substream tag) const {
    return substream(static_cast<std::uint64_t>(tag));
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Stream dedicated to replication `rep` of an experiment rooted at `seed`.
inline RandomStream replication_stream(std::uint64_t seed, std::uint64_t rep) {
  return RandomStream(derive_seed(seed, rep));
}

}  // namespace koca
