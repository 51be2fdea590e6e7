#pragma once

#include <cstdint>
#include <random>

namespace opaug {

using Rng = std::mt19937_64;

// Independent stream for (seed, index); used per trial and per sample.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace opaug
