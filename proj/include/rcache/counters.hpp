#pragma once

#include <cstdint>

namespace rcache {

/// Monotone event counters of one hierarchy instance.
struct CounterSnapshot {
  uint64_t llc_accesses = 0;
  uint64_t llc_misses = 0;
  uint64_t llc_demand_evictions = 0;
  uint64_t llc_remap_evictions = 0;
  uint64_t l1_hits = 0;
  uint64_t remaps_by_period = 0;
  uint64_t remaps_by_detector = 0;
  uint64_t remaps_completed = 0;
  uint64_t detector_windows = 0;
  uint64_t detector_firings = 0;

  uint64_t remaps_started() const { return remaps_by_period + remaps_by_detector; }
};

}  // namespace rcache
