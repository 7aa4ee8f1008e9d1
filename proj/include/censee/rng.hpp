#pragma once

#include <cstdint>

namespace censee {

// Splittable counter-based generator (SplitMix64 core). Child streams are
// derived by hashing (seed, stream id), so parallel replications draw from
// disjoint deterministic streams regardless of thread scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed + kGolden)) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal();  // inverse-CDF draw; defined in stats.cpp

  // Independent child stream; deterministic in (current seed, stream).
  Rng split(std::uint64_t stream) const {
    return Rng(mix(state_ ^ mix(stream + kGolden)));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

// Stable seed derivation for named sub-streams (CV folds, nodewise nodes,
// replications). mix_seed(s, a) == mix_seed(s, a) always; distinct a give
// unrelated streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return Rng::mix(seed ^ Rng::mix(stream + 0x9e3779b97f4a7c15ULL));
}

}  // namespace censee
