#include "rcache/llc_array.hpp"

namespace rcache {

LlcArray::LlcArray(uint32_t sets, uint32_t partitions, uint32_t ways_per_partition)
    : sets_(sets),
      partitions_(partitions),
      ways_(ways_per_partition),
      blocks_(size_t{sets} * partitions * ways_per_partition) {}

int LlcArray::find(GroupId g, uint64_t tag) const {
  auto grp = group(g);
  for (uint32_t w = 0; w < ways_; ++w)
    if (grp[w].valid && grp[w].tag == tag) return static_cast<int>(w);
  return -1;
}

uint32_t LlcArray::victim(GroupId g, Replacement policy, std::mt19937_64& rng) const {
  auto grp = group(g);
  for (uint32_t w = 0; w < ways_; ++w)
    if (!grp[w].valid) return w;
  if (policy == Replacement::Random)
    return std::uniform_int_distribution<uint32_t>(0, ways_ - 1)(rng);
  uint32_t lru = 0;
  for (uint32_t w = 1; w < ways_; ++w)
    if (grp[w].stamp < grp[lru].stamp) lru = w;
  return lru;
}

void LlcArray::place(const Slot& s, uint64_t tag, bool remapped) {
  BlockMeta& b = at(s);
  b.tag = tag;
  b.valid = true;
  b.remapped = remapped;
  b.stamp = ++clock_;
}

uint32_t LlcArray::recency_rank(const Slot& s) const {
  auto grp = group(s.group);
  const uint64_t mine = grp[s.way].stamp;
  uint32_t rank = 0;
  for (const auto& b : grp)
    if (b.valid && b.stamp > mine) ++rank;
  return rank;
}

uint64_t LlcArray::occupancy() const {
  uint64_t n = 0;
  for (const auto& b : blocks_) n += b.valid;
  return n;
}

uint64_t LlcArray::occupancy(GroupId g) const {
  uint64_t n = 0;
  for (const auto& b : group(g)) n += b.valid;
  return n;
}

void LlcArray::clear_remapped_flags() {
  for (auto& b : blocks_) b.remapped = false;
}

}  // namespace rcache
