#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rcache/attacker_view.hpp"

namespace rcache {

struct EvictionSet {
  uint64_t target = 0;
  std::vector<uint64_t> members;
  std::optional<double> measured_rate;

  size_t size() const { return members.size(); }
  bool contains(uint64_t line) const;
  /// Appends a member, refusing duplicates and the target itself.
  bool add(uint64_t line);
};

/// Abort limits for a search, checked against the view's LLC counters.
struct SearchBudget {
  uint64_t max_llc_accesses = UINT64_MAX;
  uint64_t max_llc_evictions = UINT64_MAX;

  bool exceeded(const BudgetUse& u) const {
    return u.llc_accesses >= max_llc_accesses || u.llc_evictions >= max_llc_evictions;
  }
};

struct SearchResult {
  bool found = false;
  EvictionSet set;  // partial on failure
  BudgetUse used;
  /// Algorithm-specific round count (PPT primes, GE levels).
  uint32_t rounds = 0;
};

/// Conflict testing: stream fresh lines, timing a victim access after each;
/// a slow victim access credits the line streamed just before it.
SearchResult ct_search(AttackerView& view, size_t desired_size, const SearchBudget& budget);

struct PptParams {
  /// Lines per prime. 1.5x the LLC capacity leaves a pruned set just under
  /// capacity.
  size_t prime_size = 24576;
  uint32_t max_prune_passes = 4;
  /// Tests of one pruned prime set before re-priming.
  uint32_t max_tests_per_prime = 4;
  /// Sweep direction of the first prune pass relative to the prime order.
  bool reverse_first_pass = true;
  /// Later prune passes flip direction.
  bool alternate_passes = true;
  /// Only the first pass removes slow lines; later passes just refill.
  /// Removing on every pass drops whole overflowing sets under LRU.
  bool refill_after_first_pass = true;
};

/// Prime, prune and then test.
SearchResult ppt_search(AttackerView& view, size_t desired_size, const SearchBudget& budget,
                        const PptParams& params);

struct GeParams {
  uint32_t ways = 16;
  /// Initial candidate lines; grown by growth_step until they evict the target.
  size_t initial_size = 32768;
  size_t growth_step = 2048;
  size_t max_size = 65536;
  /// Flushed retests before declaring that no group is removable.
  uint32_t retest_attempts = 3;
  /// Keep testing the remaining groups of a cycle after a removal instead of
  /// restarting the cycle.
  bool sweep = false;
};

/// Group elimination down to `ways` members.
SearchResult ge_search(AttackerView& view, const GeParams& params, const SearchBudget& budget);
/// Group elimination starting from caller-provided candidates.
SearchResult ge_reduce(AttackerView& view, std::vector<uint64_t> candidates,
                       const GeParams& params, const SearchBudget& budget);

/// Repeated prime+probe against the target: victim install, one access of
/// every member, timed victim re-access. With flush_after_probe the members
/// are flushed after every trial.
double measure_eviction_rate(AttackerView& view, const EvictionSet& set, uint32_t trials,
                             bool flush_after_probe = true);

/// Per-trial outcome sequence of measure_eviction_rate.
std::vector<bool> eviction_trace(AttackerView& view, const EvictionSet& set, uint32_t trials,
                                 bool flush_after_probe = true);

}  // namespace rcache
