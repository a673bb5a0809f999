#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mec {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream id). Every consumer of randomness in a
/// simulation instance owns its own stream so that call order in one component
/// never perturbs another.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6d65635fu};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

/// Index drawn from a probability row by inversion.
inline int sample_row(std::span<const double> row, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < static_cast<int>(row.size()); ++i) {
    if (row[i] <= 0.0) continue;
    acc += row[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

}  // namespace mec
