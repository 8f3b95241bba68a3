#include "rcache/remap_engine.hpp"

#include <cassert>
#include <stdexcept>

namespace rcache {

RemapEngine::RemapEngine(const CacheConfig& cfg, const RemapPolicy& policy, IndexKey initial)
    : cfg_(cfg), policy_(policy) {
  state_.old_key = initial;
  state_.new_key = initial;
  state_.pointer = cfg.llc_sets;
}

IndexResolution RemapEngine::resolve_index(uint64_t addr, uint32_t partition) const {
  const uint32_t sets = cfg_.llc_sets;
  const uint32_t i = derive_index(state_.old_key, partition, addr, sets);
  if (!state_.active) return {i, false, std::nullopt};
  const uint32_t i_new = derive_index(state_.new_key, partition, addr, sets);
  if (i < state_.pointer) return {i_new, true, std::nullopt};
  if (policy_.relocation == Relocation::MultiStep) return {i, false, i_new};
  return {i, false, std::nullopt};
}

FillIndex RemapEngine::fill_index(uint64_t addr, uint32_t partition) const {
  const uint32_t sets = cfg_.llc_sets;
  const uint32_t i = derive_index(state_.old_key, partition, addr, sets);
  if (!state_.active || i >= state_.pointer) return {i, false};
  return {derive_index(state_.new_key, partition, addr, sets), true};
}

TriggerCause RemapEngine::maybe_trigger(const CounterSnapshot& now, bool detector_fired) const {
  if (state_.active) return TriggerCause::None;
  if (detector_fired) return TriggerCause::Detector;
  if (!policy_.enabled) return TriggerCause::None;
  const uint64_t since = policy_.metric == PeriodMetric::Accesses
                             ? now.llc_accesses - baseline_.llc_accesses
                             : now.llc_demand_evictions - baseline_.llc_demand_evictions;
  return since >= policy_.threshold(cfg_) ? TriggerCause::Period : TriggerCause::None;
}

void RemapEngine::begin(const LlcArray& llc, const CounterSnapshot& now, IndexKey fresh) {
  assert(!state_.active);
  baseline_ = now;
  state_.active = true;
  state_.pointer = 0;
  state_.new_key = fresh;
  state_.valid_at_start = llc.occupancy();
  state_.retained = 0;
  state_.evicted_by_remap = 0;
  state_.relocations = 0;
}

bool RemapEngine::step_remap(LlcArray& llc, uint32_t n_sets, std::mt19937_64& rng,
                             const EvictFn& on_evict) {
  if (!state_.active) throw std::logic_error("step_remap called with no remap in flight");
  for (uint32_t n = 0; n < n_sets && state_.pointer < cfg_.llc_sets; ++n) {
    relocate_set(llc, state_.pointer, rng, on_evict);
    ++state_.pointer;
  }
  if (state_.pointer < cfg_.llc_sets) return false;

  state_.active = false;
  state_.old_key = state_.new_key;
  state_.retained = state_.valid_at_start - state_.evicted_by_remap;
  llc.clear_remapped_flags();
  return true;
}

uint32_t RemapEngine::chain_limit() const {
  if (policy_.relocation == Relocation::SingleStep) return 1;
  return policy_.chain_cap;  // 0: unlimited
}

void RemapEngine::relocate_set(LlcArray& llc, uint32_t set, std::mt19937_64& rng,
                               const EvictFn& on_evict) {
  for (uint32_t q = 0; q < llc.partitions(); ++q) {
    const GroupId g{q, set};
    for (uint32_t w = 0; w < llc.ways(); ++w) {
      BlockMeta& b = llc.at({g, w});
      if (!b.valid || b.remapped) continue;
      const uint64_t tag = b.tag;
      b.valid = false;
      relocate_chain(llc, q, tag, rng, on_evict);
    }
  }
}

void RemapEngine::relocate_chain(LlcArray& llc, uint32_t partition, uint64_t tag,
                                 std::mt19937_64& rng, const EvictFn& on_evict) {
  const uint32_t limit = chain_limit();
  uint64_t moving = tag;
  for (uint32_t placed = 1;; ++placed) {
    const GroupId dest{partition, derive_index(state_.new_key, partition, moving, cfg_.llc_sets)};
    const Slot slot{dest, llc.victim(dest, cfg_.replacement, rng)};
    const BlockMeta displaced = llc.at(slot);
    llc.place(slot, moving, true);
    ++state_.relocations;
    if (!displaced.valid) return;
    const bool chain_on = !displaced.remapped && (limit == 0 || placed < limit);
    if (!chain_on) {
      ++state_.evicted_by_remap;
      on_evict(displaced, dest);
      return;
    }
    moving = displaced.tag;
  }
}

}  // namespace rcache
