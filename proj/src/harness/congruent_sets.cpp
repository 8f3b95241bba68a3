#include "rcache/hierarchy_view.hpp"

namespace rcache {

void warm_up(Hierarchy& h, uint64_t lines, std::mt19937_64& rng) {
  for (uint64_t i = 0; i < lines; ++i) h.access(kVictimCore, rng());
}

EvictionSet build_partial_set(const Hierarchy& h, uint64_t target, size_t size,
                              std::mt19937_64& rng) {
  const auto& cfg = h.config();
  const auto target_sets = h.llc_sets_of(target);
  const IndexKey& key = h.remap().current_key();
  EvictionSet set;
  set.target = target;
  std::uniform_int_distribution<uint32_t> pick(0, cfg.partitions - 1);
  while (set.size() < size) {
    const uint32_t q = pick(rng);
    uint64_t line;
    do {
      line = rng();
    } while (derive_index(key, q, line, cfg.llc_sets) != target_sets[q]);
    set.add(line);
  }
  return set;
}

bool is_congruent(const Hierarchy& h, uint64_t line, uint64_t target) {
  const auto a = h.llc_sets_of(line);
  const auto b = h.llc_sets_of(target);
  for (size_t q = 0; q < a.size(); ++q)
    if (a[q] == b[q]) return true;
  return false;
}

}  // namespace rcache
