#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "rcache/counters.hpp"
#include "rcache/hierarchy.hpp"

namespace rcache {

/// Malformed trace input; line() is 1-based.
class TraceError : public std::runtime_error {
 public:
  TraceError(size_t line, const std::string& why)
      : std::runtime_error("trace line " + std::to_string(line) + ": " + why), line_(line) {}
  size_t line() const noexcept { return line_; }

 private:
  size_t line_;
};

struct TraceReport {
  /// Reads and writes replayed; flushes are not references.
  uint64_t references = 0;
  uint64_t flushes = 0;
  /// LLC misses per 1000 references.
  double mpki_proxy = 0;
  uint64_t remaps_by_period = 0;
  uint64_t remaps_by_detector = 0;
  uint64_t detector_firings = 0;
  CounterSnapshot counters;
};

/// Replays a text trace, one `<core> <R|W|F> <hex line address>` record per
/// line. Blank lines and lines starting with '#' are skipped.
TraceReport replay_trace(std::istream& in, const HierarchyOptions& opts);
TraceReport replay_trace(const std::string& path, const HierarchyOptions& opts);

}  // namespace rcache
