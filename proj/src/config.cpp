#include "rcache/config.hpp"

#include <bit>
#include <cmath>

namespace rcache {

void CacheConfig::validate() const {
  if (llc_sets == 0 || !std::has_single_bit(llc_sets))
    throw ConfigError("llc_sets", "must be a power of two");
  if (llc_ways == 0) throw ConfigError("llc_ways", "must be positive");
  if (partitions == 0 || llc_ways % partitions != 0)
    throw ConfigError("partitions", "must divide llc_ways");
  if (l1_sets == 0 || !std::has_single_bit(l1_sets))
    throw ConfigError("l1_sets", "must be a power of two");
  if (l1_ways == 0) throw ConfigError("l1_ways", "must be positive");
  if (cores < 2) throw ConfigError("cores", "need an attacker core and a victim core");
}

void RemapPolicy::validate() const {
  if (period_per_block < 1) throw ConfigError("period_per_block", "must be >= 1");
  if (relocation_rate < 1) throw ConfigError("relocation_rate", "must be >= 1");
}

void DetectorConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha", "must lie in (0, 1]");
  if (sample_period < 1) throw ConfigError("sample_period", "must be >= 1");
  if (!(threshold > 0.0) || !std::isfinite(threshold))
    throw ConfigError("threshold", "must be positive");
}

const char* to_string(Replacement r) { return r == Replacement::Lru ? "lru" : "random"; }
const char* to_string(PeriodMetric m) {
  return m == PeriodMetric::Accesses ? "accesses" : "evictions";
}
const char* to_string(Relocation r) {
  return r == Relocation::SingleStep ? "single" : "multi";
}

Replacement parse_replacement(const std::string& s, const std::string& field) {
  if (s == "lru") return Replacement::Lru;
  if (s == "random") return Replacement::Random;
  throw ConfigError(field, "expected lru or random, got '" + s + "'");
}

PeriodMetric parse_metric(const std::string& s, const std::string& field) {
  if (s == "accesses" || s == "acc") return PeriodMetric::Accesses;
  if (s == "evictions" || s == "ev") return PeriodMetric::Evictions;
  throw ConfigError(field, "expected accesses or evictions, got '" + s + "'");
}

Relocation parse_relocation(const std::string& s, const std::string& field) {
  if (s == "single") return Relocation::SingleStep;
  if (s == "multi") return Relocation::MultiStep;
  throw ConfigError(field, "expected single or multi, got '" + s + "'");
}

}  // namespace rcache
