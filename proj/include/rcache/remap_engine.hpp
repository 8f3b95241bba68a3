#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "rcache/config.hpp"
#include "rcache/counters.hpp"
#include "rcache/index_randomizer.hpp"
#include "rcache/llc_array.hpp"

namespace rcache {

struct RemapState {
  bool active = false;
  uint32_t pointer = 0;  // next set to relocate; S when done
  IndexKey old_key;      // key in force before the remap (and while inactive)
  IndexKey new_key;
  uint64_t valid_at_start = 0;
  uint64_t retained = 0;
  uint64_t evicted_by_remap = 0;
  uint64_t relocations = 0;
};

/// Where to look up a line in one partition. `retry` is set only for
/// multi-step relocation, where a block whose old set is not yet relocated
/// may already have been pushed to its new set by a chain.
struct IndexResolution {
  uint32_t first = 0;
  bool first_is_new = false;
  std::optional<uint32_t> retry;
};

struct FillIndex {
  uint32_t set = 0;
  bool remapped = false;
};

enum class TriggerCause { None, Period, Detector };

/// Key rotation with gradual relocation of resident blocks.
///
/// Sets are relocated in pointer order, one whole set (all partitions) per
/// step. A block keeps its partition when relocated. Single-step relocation
/// evicts the destination victim; multi-step relocation keeps relocating an
/// unremapped victim until it reaches a free way or displaces a block that
/// was already remapped, which is evicted.
class RemapEngine {
 public:
  using EvictFn = std::function<void(const BlockMeta&, GroupId)>;

  RemapEngine(const CacheConfig& cfg, const RemapPolicy& policy, IndexKey initial);

  const RemapState& state() const { return state_; }
  const RemapPolicy& policy() const { return policy_; }
  bool active() const { return state_.active; }

  /// The key used for everything while no remap is in flight.
  const IndexKey& current_key() const { return state_.old_key; }

  IndexResolution resolve_index(uint64_t addr, uint32_t partition) const;
  FillIndex fill_index(uint64_t addr, uint32_t partition) const;

  /// Period or detector trigger, measured against the snapshot taken at the
  /// last remap start. Always None while a remap is in flight.
  TriggerCause maybe_trigger(const CounterSnapshot& now, bool detector_fired) const;

  /// Starts a remap towards `fresh`; `now` becomes the new period baseline.
  void begin(const LlcArray& llc, const CounterSnapshot& now, IndexKey fresh);

  /// Relocates up to n_sets more sets. Returns true when the remap finished
  /// (keys rotated, remapped flags cleared).
  bool step_remap(LlcArray& llc, uint32_t n_sets, std::mt19937_64& rng,
                  const EvictFn& on_evict);

 private:
  void relocate_set(LlcArray& llc, uint32_t set, std::mt19937_64& rng,
                    const EvictFn& on_evict);
  void relocate_chain(LlcArray& llc, uint32_t partition, uint64_t tag,
                      std::mt19937_64& rng, const EvictFn& on_evict);
  uint32_t chain_limit() const;

  CacheConfig cfg_;
  RemapPolicy policy_;
  RemapState state_;
  CounterSnapshot baseline_;
};

}  // namespace rcache
