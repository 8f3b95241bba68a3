#include "rcache/index_randomizer.hpp"

namespace rcache {

uint32_t derive_index(const IndexKey& key, uint32_t partition, uint64_t line_addr,
                      uint32_t sets) {
  const uint64_t inner = mix64(line_addr ^ key.lo);
  const uint64_t outer =
      mix64(inner ^ key.hi ^ ((uint64_t{partition} + 1) * 0x9e3779b97f4a7c15ULL));
  return static_cast<uint32_t>(outer & (uint64_t{sets} - 1));
}

IndexKey fresh_key(std::mt19937_64& rng) {
  IndexKey k;
  k.lo = rng();
  k.hi = rng();
  return k;
}

}  // namespace rcache
