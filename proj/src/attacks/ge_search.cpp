#include <algorithm>

#include "rcache/attacks.hpp"

namespace rcache {

namespace {

/// Eviction tests against the target. A victim access that hits its private
/// cache leaves the target's LLC recency stale, so fewer than `ways`
/// congruent lines may still evict it. The target is known fresh only right
/// after a slow victim access; a positive from a stale start is repeated.
class EvictionTester {
 public:
  explicit EvictionTester(AttackerView& view) : view_(view) {}

  bool operator()(const std::vector<uint64_t>& lines, bool flush_first) {
    if (flush_first)
      for (uint64_t l : lines) view_.flush(l);
    if (view_.trigger_victim() == Latency::Slow) fresh_ = true;
    const bool started_fresh = fresh_;
    if (!pass(lines)) return false;
    if (started_fresh) return true;
    return pass(lines);
  }

 private:
  bool pass(const std::vector<uint64_t>& lines) {
    for (uint64_t l : lines) view_.access(l);
    fresh_ = view_.trigger_victim() == Latency::Slow;
    return fresh_;
  }

  AttackerView& view_;
  bool fresh_ = false;
};

}  // namespace

SearchResult ge_reduce(AttackerView& view, std::vector<uint64_t> candidates,
                       const GeParams& params, const SearchBudget& budget) {
  SearchResult r;
  r.set.target = view.target();
  auto stop = [&] { return view.halted() || budget.exceeded(view.used()); };
  EvictionTester evicts_target(view);

  std::vector<uint64_t> rest;
  while (candidates.size() > params.ways) {
    ++r.rounds;
    const size_t groups = std::min<size_t>(params.ways + 1, candidates.size());
    const size_t n = candidates.size();
    bool removed = false;
    // Attempt 0 tests on the live cache state. Later attempts flush the
    // remainder first, so every member refills and reaches the LLC; this
    // undoes false negatives from lines hiding in the private cache.
    for (uint32_t attempt = 0; attempt <= params.retest_attempts && !removed; ++attempt) {
      std::vector<bool> dropped(groups, false);
      for (size_t g = 0; g < groups; ++g) {
        if (stop()) {
          r.set.members = candidates;
          r.used = view.used();
          return r;
        }
        const size_t lo = g * n / groups;
        const size_t hi = (g + 1) * n / groups;
        rest.clear();
        for (size_t h = 0; h < groups; ++h) {
          if (h == g || dropped[h]) continue;
          rest.insert(rest.end(), candidates.begin() + h * n / groups,
                      candidates.begin() + (h + 1) * n / groups);
        }
        if (rest.size() < params.ways) break;
        if (evicts_target(rest, attempt > 0)) {
          for (size_t i = lo; i < hi; ++i) view.flush(candidates[i]);
          dropped[g] = true;
          removed = true;
          if (!params.sweep) break;
        }
      }
      if (removed) {
        rest.clear();
        for (size_t h = 0; h < groups; ++h)
          if (!dropped[h])
            rest.insert(rest.end(), candidates.begin() + h * n / groups,
                        candidates.begin() + (h + 1) * n / groups);
        candidates.swap(rest);
      }
    }
    if (!removed) {
      r.set.members = candidates;
      r.used = view.used();
      return r;
    }
  }
  r.set.members = candidates;
  r.found = candidates.size() == params.ways;
  r.used = view.used();
  return r;
}

SearchResult ge_search(AttackerView& view, const GeParams& params, const SearchBudget& budget) {
  std::vector<uint64_t> candidates;
  candidates.reserve(params.initial_size);
  for (size_t i = 0; i < params.initial_size; ++i) candidates.push_back(view.fresh_line());
  // Grow the initial set until it evicts the target.
  EvictionTester evicts_target(view);
  while (!evicts_target(candidates, false)) {
    if (candidates.size() + params.growth_step > params.max_size || view.halted() ||
        budget.exceeded(view.used())) {
      SearchResult r;
      r.set.target = view.target();
      r.used = view.used();
      return r;
    }
    for (size_t i = 0; i < params.growth_step; ++i) candidates.push_back(view.fresh_line());
  }
  return ge_reduce(view, std::move(candidates), params, budget);
}

}  // namespace rcache
