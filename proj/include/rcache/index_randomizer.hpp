#pragma once

#include <compare>
#include <cstdint>
#include <random>

namespace rcache {

/// 128 bits of key material for the set-index mapping.
struct IndexKey {
  uint64_t lo = 0;
  uint64_t hi = 0;

  friend bool operator==(const IndexKey&, const IndexKey&) = default;
};

/// Keyed set-index function standing in for the LLC's address encryptor.
///
/// Modeling assumption: the encryptor is unbreakable, so all the simulator
/// needs is a well-mixed keyed hash. Two rounds of the splitmix64 finalizer
/// over (address, key, partition) are truncated to log2(sets) bits, so `sets`
/// must be a power of two.
uint32_t derive_index(const IndexKey& key, uint32_t partition, uint64_t line_addr,
                      uint32_t sets);

IndexKey fresh_key(std::mt19937_64& rng);

/// splitmix64 finalizer; also used to derive per-trial seeds.
constexpr uint64_t mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace rcache
