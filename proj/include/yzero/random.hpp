#pragma once

#include <cstdint>
#include <random>

namespace yzero {

using Rng = std::mt19937_64;

/// Independent generator for one stream of a run. Streams are addressed by
/// (master seed, stream id, substream id) so results never depend on how work
/// is split between threads.
inline Rng make_rng(std::uint64_t master, std::uint64_t stream, std::uint64_t substream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(substream), static_cast<std::uint32_t>(substream >> 32)};
  return Rng(seq);
}

}  // namespace yzero
