#include "rcache/attacks.hpp"

namespace rcache {

std::vector<bool> eviction_trace(AttackerView& view, const EvictionSet& set, uint32_t trials,
                                 bool flush_after_probe) {
  std::vector<bool> out;
  out.reserve(trials);
  for (uint32_t t = 0; t < trials; ++t) {
    view.trigger_victim();
    for (uint64_t m : set.members) view.access(m);
    out.push_back(view.trigger_victim() == Latency::Slow);
    if (flush_after_probe)
      for (uint64_t m : set.members) view.flush(m);
  }
  return out;
}

double measure_eviction_rate(AttackerView& view, const EvictionSet& set, uint32_t trials,
                             bool flush_after_probe) {
  if (trials == 0 || set.members.empty()) return 0.0;
  const auto trace = eviction_trace(view, set, trials, flush_after_probe);
  size_t evicted = 0;
  for (bool e : trace) evicted += e;
  return static_cast<double>(evicted) / trials;
}

}  // namespace rcache
