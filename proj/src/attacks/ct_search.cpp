#include <algorithm>

#include "rcache/attacks.hpp"

namespace rcache {

bool EvictionSet::contains(uint64_t line) const {
  return std::find(members.begin(), members.end(), line) != members.end();
}

bool EvictionSet::add(uint64_t line) {
  if (line == target || contains(line)) return false;
  members.push_back(line);
  return true;
}

SearchResult ct_search(AttackerView& view, size_t desired_size, const SearchBudget& budget) {
  SearchResult r;
  r.set.target = view.target();
  view.trigger_victim();
  // With one streamed line per probe the slow victim access pins the
  // conflict on that line exactly.
  while (r.set.size() < desired_size) {
    if (view.halted() || budget.exceeded(view.used())) {
      r.used = view.used();
      return r;
    }
    const uint64_t line = view.fresh_line();
    view.access(line);
    if (view.trigger_victim() == Latency::Slow) r.set.add(line);
  }
  r.found = true;
  r.used = view.used();
  return r;
}

}  // namespace rcache
