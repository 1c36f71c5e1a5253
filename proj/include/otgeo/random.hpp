#pragma once

#include <cstdint>
#include <random>

namespace otgeo {

/// Identifies one logical random stream. Two specs with the same
/// (master_seed, stream_id) always yield the same sequence.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  /// Child stream, e.g. one per Monte Carlo block or per repeat.
  [[nodiscard]] SeedSpec derive(std::uint64_t sub) const;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

Rng make_rng(const SeedSpec& seed);

}  // namespace otgeo
