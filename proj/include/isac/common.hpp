#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace isac {

inline constexpr double kSpeedOfLight = 299792458.0;

using cplx = std::complex<double>;

/// Point detection in the range/speed plane. Power is relative to the
/// strongest cell of the frame it was extracted from.
struct Detection {
  double range_m = 0.0;
  double speed_mps = 0.0;
  double power_db = 0.0;
};

/// splitmix64 step, used to derive well-separated substream seeds from a
/// single user-facing seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix_seed(seed, stream));
}

}  // namespace isac
