#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rcache/config.hpp"
#include "rcache/counters.hpp"
#include "rcache/detector.hpp"
#include "rcache/llc_array.hpp"
#include "rcache/remap_engine.hpp"

namespace rcache {

enum class Level { L1Hit, LlcHit, Miss };

struct AccessOutcome {
  Level level = Level::Miss;
  /// Demand eviction caused by the fill, present only on a miss into an
  /// occupied slot.
  std::optional<GroupId> llc_eviction;
};

struct HierarchyOptions {
  CacheConfig cache;
  RemapPolicy remap;
  DetectorConfig detector;
  uint64_t seed = 1;
};

/// Private per-core L1s over a shared, inclusive, randomized LLC.
///
/// L1s are physically indexed by the low line-address bits and use LRU.
/// LLC fills pick a partition uniformly at random, then a victim inside that
/// partition's set. Any LLC eviction purges the line from every L1.
class Hierarchy {
 public:
  explicit Hierarchy(const HierarchyOptions& opts);

  AccessOutcome access(uint32_t core, uint64_t line);

  /// Invalidates the line everywhere; not counted as an access or eviction.
  void flush(uint64_t line);

  // Ground-truth probes for tests and metrics. Attack code never sees these.
  bool is_cached_llc(uint64_t line) const;
  bool is_cached_l1(uint32_t core, uint64_t line) const;
  std::optional<Slot> llc_location(uint64_t line) const;
  /// Sets the line maps to in each partition under the key in force.
  std::vector<uint32_t> llc_sets_of(uint64_t line) const;

  const CounterSnapshot& counters() const { return counters_; }
  const CacheConfig& config() const { return cfg_; }
  const LlcArray& llc() const { return llc_; }
  const RemapEngine& remap() const { return remap_; }
  Detector* detector() { return detector_ ? &*detector_ : nullptr; }
  const Detector* detector() const { return detector_ ? &*detector_ : nullptr; }

  /// Starts a remap now, regardless of triggers.
  void force_remap();
  /// Runs an in-flight remap to completion without further accesses.
  void finish_remap();

  /// Invariant checks used by the property suites; empty string when healthy.
  std::string check_invariants() const;

 private:
  struct L1Line {
    uint64_t tag = 0;
    bool valid = false;
    uint64_t stamp = 0;
  };

  std::optional<Slot> find_llc(uint64_t line) const;
  bool l1_lookup(uint32_t core, uint64_t line);
  void l1_fill(uint32_t core, uint64_t line);
  void l1_invalidate_all(uint64_t line);
  L1Line* l1_set(uint32_t core, uint64_t line);
  const L1Line* l1_set(uint32_t core, uint64_t line) const;

  void on_remap_evict(const BlockMeta& b);
  void start_remap(TriggerCause cause);
  void advance_remap(uint32_t n_sets);

  CacheConfig cfg_;
  std::mt19937_64 rng_;
  LlcArray llc_;
  RemapEngine remap_;
  std::optional<Detector> detector_;
  std::vector<L1Line> l1_;
  uint64_t l1_clock_ = 0;
  CounterSnapshot counters_;
};

}  // namespace rcache
