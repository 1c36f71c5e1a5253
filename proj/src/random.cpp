#include "otgeo/random.hpp"

namespace otgeo {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeedSpec SeedSpec::derive(std::uint64_t sub) const {
  return SeedSpec{master_seed, splitmix64(stream_id ^ splitmix64(sub + 0x5bd1e995ULL))};
}

Rng make_rng(const SeedSpec& seed) {
  const std::uint64_t a = splitmix64(seed.master_seed);
  const std::uint64_t b = splitmix64(a ^ splitmix64(seed.stream_id + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

}  // namespace otgeo
