#include <algorithm>

#include "rcache/attacks.hpp"

namespace rcache {

namespace {

/// Sweeps `lines` in the given direction, returning the slow ones.
template <typename Fn>
void sweep(const std::vector<uint64_t>& lines, bool reverse, Fn&& fn) {
  if (reverse)
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) fn(*it);
  else
    for (uint64_t l : lines) fn(l);
}

}  // namespace

SearchResult ppt_search(AttackerView& view, size_t desired_size, const SearchBudget& budget,
                        const PptParams& params) {
  SearchResult r;
  r.set.target = view.target();
  auto stop = [&] { return view.halted() || budget.exceeded(view.used()); };
  auto fail = [&] {
    r.used = view.used();
    return r;
  };

  std::vector<uint64_t> prime;
  std::vector<uint64_t> kept;
  while (true) {
    if (stop()) return fail();
    ++r.rounds;
    // Leftover candidates from an earlier round would sit in the target set
    // and shadow the new prime set.
    for (uint64_t m : r.set.members) view.flush(m);

    prime.clear();
    prime.reserve(params.prime_size);
    for (size_t i = 0; i < params.prime_size; ++i) {
      if ((i & 1023) == 0 && stop()) return fail();
      const uint64_t l = view.fresh_line();
      view.access(l);
      prime.push_back(l);
    }

    bool reverse = params.reverse_first_pass;
    bool last_reverse = reverse;
    for (uint32_t pass = 0; pass < params.max_prune_passes; ++pass) {
      last_reverse = reverse;
      const bool removing = pass == 0 || !params.refill_after_first_pass;
      size_t slow = 0;
      kept.clear();
      sweep(prime, reverse, [&](uint64_t l) {
        if (view.access(l) == Latency::Slow) {
          ++slow;
          if (removing) return;
        }
        kept.push_back(l);
      });
      if (reverse) std::reverse(kept.begin(), kept.end());
      prime.swap(kept);
      if (slow == 0) break;
      if (stop()) return fail();
      if (params.alternate_passes) reverse = !reverse;
    }
    // The test sweep follows the order of the last prune pass, which is the
    // LLC's recency order for a fully primed set.
    for (uint32_t t = 0; t < params.max_tests_per_prime; ++t) {
      if (stop()) return fail();
      view.trigger_victim();
      size_t found = 0;
      sweep(prime, last_reverse, [&](uint64_t l) {
        if (view.access(l) == Latency::Slow && r.set.add(l)) ++found;
      });
      if (r.set.size() >= desired_size) {
        r.found = true;
        r.used = view.used();
        return r;
      }
      if (found == 0) break;
    }
  }
}

}  // namespace rcache
