#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rcache {

/// Raised for an invalid configuration; what() names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& why)
      : std::invalid_argument(field + ": " + why), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Replacement { Lru, Random };

/// Geometry of the shared LLC and the private L1s.
///
/// The LLC has `partitions` independently indexed partitions, each holding
/// `llc_sets` sets of `llc_ways / partitions` ways. partitions == 1 is the
/// randomized set-associative (CEASER style) cache.
struct CacheConfig {
  uint32_t llc_sets = 1024;
  uint32_t llc_ways = 16;
  uint32_t partitions = 1;
  Replacement replacement = Replacement::Lru;
  uint32_t l1_sets = 64;
  uint32_t l1_ways = 8;
  uint32_t cores = 2;

  uint32_t ways_per_partition() const { return llc_ways / partitions; }
  uint64_t llc_blocks() const { return uint64_t{llc_sets} * llc_ways; }

  void validate() const;
};

enum class PeriodMetric { Accesses, Evictions };
enum class Relocation { SingleStep, MultiStep };

/// Remap trigger and relocation knobs. The period threshold is
/// period_per_block * S * W events of the chosen metric.
struct RemapPolicy {
  bool enabled = false;
  PeriodMetric metric = PeriodMetric::Evictions;
  uint32_t period_per_block = 10;
  Relocation relocation = Relocation::SingleStep;
  /// Sets relocated per LLC access while a remap is in flight.
  uint32_t relocation_rate = 1;
  /// Maximum placements in one multi-step chain; 0 means unlimited.
  uint32_t chain_cap = 0;

  uint64_t threshold(const CacheConfig& cfg) const {
    return uint64_t{period_per_block} * cfg.llc_blocks();
  }
  void validate() const;
};

struct DetectorConfig {
  bool enabled = false;
  uint64_t sample_period = 4096;
  double alpha = 1.0 / 32.0;
  double threshold = 5.0;

  void validate() const;
};

const char* to_string(Replacement r);
const char* to_string(PeriodMetric m);
const char* to_string(Relocation r);

// Inverses of to_string; throw ConfigError naming `field`.
Replacement parse_replacement(const std::string& s, const std::string& field = "replacement");
PeriodMetric parse_metric(const std::string& s, const std::string& field = "metric");
Relocation parse_relocation(const std::string& s, const std::string& field = "relocation");

}  // namespace rcache
