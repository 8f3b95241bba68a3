#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcache/config.hpp"

namespace rcache {

enum class ExperimentKind {
  EvRate,
  SearchCt,
  SearchPpt,
  SearchGe,
  Retention,
  DetectSweep,
  Analytic,
  TraceReplay,
};

const char* to_string(ExperimentKind k);
/// Accepts the CSV/CLI spelling, e.g. "evrate", "search_ppt".
ExperimentKind parse_kind(const std::string& s);

enum class AttackKind { Ct, Ppt, Ge };
const char* to_string(AttackKind a);
AttackKind parse_attack(const std::string& s, const std::string& field = "attack");

/// Knobs shared by the experiment kinds; each kind reads the ones it needs.
struct ExperimentParams {
  /// Eviction-set size L (EVRATE, CT, PPT, ANALYTIC). 0 means the LLC ways.
  uint64_t set_size = 0;
  /// Probes per EVRATE trial, all on one freshly built set. Later probes of
  /// the same set see the target settle where the set is weakest.
  uint32_t probes = 1;
  bool flush_after_probe = true;
  uint64_t budget_accesses = UINT64_MAX;
  uint64_t budget_evictions = UINT64_MAX;
  /// Start attacks on a cache filled with unrelated lines.
  bool warm_up = true;
  /// A remap ends the attack (DETECT_SWEEP and searches).
  bool stop_on_remap = true;
  /// Search run by DETECT_SWEEP.
  AttackKind attack = AttackKind::Ppt;
  /// ANALYTIC eviction rate in Hz.
  double frequency = 8e8;
  std::string trace_path;
};

/// One swept parameter. `field` must be one of sweep_fields().
struct SweepAxis {
  std::string field;
  std::vector<double> values;
};

const std::vector<std::string>& sweep_fields();

struct CampaignSpec {
  ExperimentKind kind = ExperimentKind::EvRate;
  CacheConfig cache;
  RemapPolicy remap;
  DetectorConfig detector;
  ExperimentParams params;
  uint32_t trials = 1;
  uint64_t seed = 1;
  std::vector<SweepAxis> axes;

  /// Throws ConfigError naming the first bad field.
  void validate() const;
  /// Number of sweep points (product of axis lengths, 1 without axes).
  size_t points() const;
  /// This spec with the given sweep point applied.
  CampaignSpec at_point(size_t point) const;
  std::vector<double> point_values(size_t point) const;
};

void apply_field(CampaignSpec& spec, const std::string& field, double value);

nlohmann::json to_json(const CampaignSpec& spec);
/// Missing keys keep their defaults; unknown keys are rejected.
CampaignSpec spec_from_json(const nlohmann::json& j);
/// Stable 64-bit hash of the canonical JSON form.
uint64_t spec_hash(const CampaignSpec& spec);

struct TrialRow {
  std::vector<double> point;
  uint32_t point_index = 0;
  uint32_t trial = 0;
  uint64_t seed = 0;
  std::string outcome;
  uint64_t llc_accesses = 0;
  uint64_t llc_demand_evictions = 0;
  uint64_t remaps = 0;
  uint64_t detector_firings = 0;
  /// Rate, success flag, retained fraction or expected seconds, per kind.
  /// A search succeeds only if its set is still congruent with the target
  /// after any remap in flight has completed.
  double value = 0;
  /// Congruent members, probes, relocations or success probability, per kind.
  double aux = 0;
  uint32_t rounds = 0;
};

struct CampaignResult {
  ExperimentKind kind = ExperimentKind::EvRate;
  uint64_t spec_hash = 0;
  std::vector<std::string> axis_names;
  /// Point-major, then trial order.
  std::vector<TrialRow> rows;
};

/// Per-trial seed; independent of the worker count.
uint64_t trial_seed(uint64_t campaign_seed, size_t point, uint32_t trial);

/// Runs one trial of an already resolved (single-point) spec.
TrialRow run_trial(const CampaignSpec& resolved, uint32_t trial, uint64_t seed);

/// CACHESIM_JOBS if set, else the hardware concurrency.
unsigned default_jobs();

/// Runs every trial of every sweep point on `jobs` workers (0 = default).
/// A trial that throws aborts the campaign with that exception.
CampaignResult run_campaign(const CampaignSpec& spec, unsigned jobs = 0);

}  // namespace rcache
