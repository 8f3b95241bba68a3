#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rcache/config.hpp"

namespace rcache {

struct BlockMeta {
  uint64_t tag = 0;  // full line address
  bool valid = false;
  bool remapped = false;
  uint64_t stamp = 0;  // last-use clock, LRU victim has the smallest stamp
};

/// (partition, set) coordinates of one replacement group.
struct GroupId {
  uint32_t partition = 0;
  uint32_t set = 0;

  friend bool operator==(const GroupId&, const GroupId&) = default;
};

struct Slot {
  GroupId group;
  uint32_t way = 0;
};

/// Tag/metadata storage for a (possibly skewed) LLC: partitions x sets x ways.
/// Knows nothing about index functions; callers pass resolved set indices.
class LlcArray {
 public:
  LlcArray(uint32_t sets, uint32_t partitions, uint32_t ways_per_partition);

  uint32_t sets() const { return sets_; }
  uint32_t partitions() const { return partitions_; }
  uint32_t ways() const { return ways_; }

  std::span<BlockMeta> group(GroupId g) {
    return {blocks_.data() + offset(g), ways_};
  }
  std::span<const BlockMeta> group(GroupId g) const {
    return {blocks_.data() + offset(g), ways_};
  }
  BlockMeta& at(const Slot& s) { return blocks_[offset(s.group) + s.way]; }
  const BlockMeta& at(const Slot& s) const { return blocks_[offset(s.group) + s.way]; }

  /// Way holding `tag` in group g, or -1.
  int find(GroupId g, uint64_t tag) const;

  /// Replacement victim: the first invalid way, else LRU or uniform random.
  uint32_t victim(GroupId g, Replacement policy, std::mt19937_64& rng) const;

  void touch(const Slot& s) { at(s).stamp = ++clock_; }

  /// Installs `tag` at s as the most recently used block.
  void place(const Slot& s, uint64_t tag, bool remapped);

  /// Position of the block at s in its group's recency order (0 = MRU).
  uint32_t recency_rank(const Slot& s) const;

  uint64_t occupancy() const;
  uint64_t occupancy(GroupId g) const;

  void clear_remapped_flags();
  std::span<const BlockMeta> all() const { return blocks_; }

 private:
  size_t offset(GroupId g) const {
    return (size_t{g.partition} * sets_ + g.set) * ways_;
  }

  uint32_t sets_;
  uint32_t partitions_;
  uint32_t ways_;
  uint64_t clock_ = 0;
  std::vector<BlockMeta> blocks_;
};

}  // namespace rcache
