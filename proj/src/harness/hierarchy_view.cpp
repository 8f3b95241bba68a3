#include "rcache/hierarchy_view.hpp"

namespace rcache {

HierarchyView::HierarchyView(Hierarchy& h, uint64_t target, uint64_t seed)
    : h_(h), target_(target), rng_(seed), start_(h.counters()) {}

Latency HierarchyView::access(uint64_t line) {
  return h_.access(kAttackerCore, line).level == Level::Miss ? Latency::Slow : Latency::Fast;
}

void HierarchyView::flush(uint64_t line) { h_.flush(line); }

Latency HierarchyView::trigger_victim() {
  return h_.access(kVictimCore, target_).level == Level::Miss ? Latency::Slow : Latency::Fast;
}

uint64_t HierarchyView::fresh_line() {
  uint64_t l;
  do {
    l = rng_();
  } while (l == target_);
  return l;
}

BudgetUse HierarchyView::used() const {
  const auto& c = h_.counters();
  return {c.llc_accesses - start_.llc_accesses,
          c.llc_demand_evictions - start_.llc_demand_evictions};
}

bool HierarchyView::halted() const {
  return stop_on_remap_ && h_.counters().remaps_started() > start_.remaps_started();
}

void HierarchyView::rebase() { start_ = h_.counters(); }

}  // namespace rcache
