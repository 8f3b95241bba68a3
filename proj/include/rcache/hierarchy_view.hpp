#pragma once

#include <cstdint>
#include <random>

#include "rcache/attacker_view.hpp"
#include "rcache/attacks.hpp"
#include "rcache/hierarchy.hpp"

namespace rcache {

inline constexpr uint32_t kAttackerCore = 0;
inline constexpr uint32_t kVictimCore = 1;

/// AttackerView over a live hierarchy: attacker on core 0, victim on core 1.
/// Budget use is measured as counter deltas since construction.
class HierarchyView final : public AttackerView {
 public:
  HierarchyView(Hierarchy& h, uint64_t target, uint64_t seed);

  Latency access(uint64_t line) override;
  void flush(uint64_t line) override;
  Latency trigger_victim() override;
  uint64_t fresh_line() override;
  uint64_t target() const override { return target_; }
  BudgetUse used() const override;
  bool halted() const override;

  /// Halt the attack as soon as the cache starts a remap.
  void stop_on_remap(bool on) { stop_on_remap_ = on; }
  /// Restart the budget accounting from the current counters.
  void rebase();

 private:
  Hierarchy& h_;
  uint64_t target_;
  std::mt19937_64 rng_;
  CounterSnapshot start_;
  bool stop_on_remap_ = false;
};

/// Fills the LLC with `lines` random lines on the victim core so attacks do
/// not start on a cold cache.
void warm_up(Hierarchy& h, uint64_t lines, std::mt19937_64& rng);

/// Ground-truth construction of a partially congruent eviction set: every
/// member is congruent with the target in one partition chosen uniformly at
/// random, mirroring what conflict testing collects.
EvictionSet build_partial_set(const Hierarchy& h, uint64_t target, size_t size,
                              std::mt19937_64& rng);

/// True when `line` shares the target's set in at least one partition.
bool is_congruent(const Hierarchy& h, uint64_t line, uint64_t target);

}  // namespace rcache
