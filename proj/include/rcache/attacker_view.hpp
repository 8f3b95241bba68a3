#pragma once

#include <cstdint>

namespace rcache {

enum class Latency { Fast, Slow };

/// LLC activity charged to an attack so far.
struct BudgetUse {
  uint64_t llc_accesses = 0;
  uint64_t llc_evictions = 0;
};

/// Everything an attacker may observe or do.
///
/// Accesses run on the attacker's core and report only fast (L1 or LLC hit)
/// or slow (miss). trigger_victim() makes the victim touch the target once;
/// the attacker learns the latency of that access. No set indices, keys or
/// residency probes are exposed.
class AttackerView {
 public:
  virtual ~AttackerView() = default;

  virtual Latency access(uint64_t line) = 0;
  virtual void flush(uint64_t line) = 0;
  virtual Latency trigger_victim() = 0;

  /// A line the attacker owns and has never touched before.
  virtual uint64_t fresh_line() = 0;

  /// The victim line the attacker is trying to evict.
  virtual uint64_t target() const = 0;

  virtual BudgetUse used() const = 0;
  /// Set by the experiment when the attack must stop (e.g. the cache remapped).
  virtual bool halted() const = 0;
};

}  // namespace rcache
