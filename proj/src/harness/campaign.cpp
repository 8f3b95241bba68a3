#include "rcache/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "rcache/analytics.hpp"
#include "rcache/attacks.hpp"
#include "rcache/hierarchy_view.hpp"
#include "rcache/index_randomizer.hpp"
#include "rcache/trace.hpp"

namespace rcache {

namespace {

struct KindName {
  ExperimentKind kind;
  const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::EvRate, "evrate"},         {ExperimentKind::SearchCt, "search_ct"},
    {ExperimentKind::SearchPpt, "search_ppt"},  {ExperimentKind::SearchGe, "search_ge"},
    {ExperimentKind::Retention, "retention"},   {ExperimentKind::DetectSweep, "detect_sweep"},
    {ExperimentKind::Analytic, "analytic"},     {ExperimentKind::TraceReplay, "trace_replay"},
};

uint64_t as_count(double v, const std::string& field) {
  if (!(v >= 0) || !std::isfinite(v)) throw ConfigError(field, "must be a non-negative number");
  if (v >= 1.8e19) return UINT64_MAX;
  return static_cast<uint64_t>(std::llround(v));
}

uint32_t as_u32(double v, const std::string& field) {
  const uint64_t c = as_count(v, field);
  if (c > UINT32_MAX) throw ConfigError(field, "out of range");
  return static_cast<uint32_t>(c);
}

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const auto& e : kKinds)
    if (e.kind == k) return e.name;
  return "?";
}

ExperimentKind parse_kind(const std::string& s) {
  for (const auto& e : kKinds)
    if (s == e.name) return e.kind;
  throw ConfigError("kind", "unknown experiment kind '" + s + "'");
}

const char* to_string(AttackKind a) {
  switch (a) {
    case AttackKind::Ct: return "ct";
    case AttackKind::Ppt: return "ppt";
    case AttackKind::Ge: return "ge";
  }
  return "?";
}

AttackKind parse_attack(const std::string& s, const std::string& field) {
  if (s == "ct") return AttackKind::Ct;
  if (s == "ppt") return AttackKind::Ppt;
  if (s == "ge") return AttackKind::Ge;
  throw ConfigError(field, "expected ct, ppt or ge, got '" + s + "'");
}

const std::vector<std::string>& sweep_fields() {
  static const std::vector<std::string> fields = {
      "sets",           "ways",         "partitions",      "set_size",
      "period",         "probes",       "budget_accesses", "budget_evictions",
      "detector_threshold", "detector_alpha", "sample_period", "chain_cap",
      "relocation_rate",
  };
  return fields;
}

void apply_field(CampaignSpec& s, const std::string& f, double v) {
  if (f == "sets") s.cache.llc_sets = as_u32(v, f);
  else if (f == "ways") s.cache.llc_ways = as_u32(v, f);
  else if (f == "partitions") s.cache.partitions = as_u32(v, f);
  else if (f == "set_size") s.params.set_size = as_count(v, f);
  else if (f == "period") s.remap.period_per_block = as_u32(v, f);
  else if (f == "probes") s.params.probes = as_u32(v, f);
  else if (f == "budget_accesses") s.params.budget_accesses = as_count(v, f);
  else if (f == "budget_evictions") s.params.budget_evictions = as_count(v, f);
  else if (f == "detector_threshold") s.detector.threshold = v;
  else if (f == "detector_alpha") s.detector.alpha = v;
  else if (f == "sample_period") s.detector.sample_period = as_count(v, f);
  else if (f == "chain_cap") s.remap.chain_cap = as_u32(v, f);
  else if (f == "relocation_rate") s.remap.relocation_rate = as_u32(v, f);
  else throw ConfigError(f, "not a sweepable field");
}

size_t CampaignSpec::points() const {
  size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

std::vector<double> CampaignSpec::point_values(size_t point) const {
  std::vector<double> out(axes.size());
  // The last axis varies fastest.
  for (size_t i = axes.size(); i-- > 0;) {
    const size_t n = axes[i].values.size();
    out[i] = axes[i].values[point % n];
    point /= n;
  }
  return out;
}

CampaignSpec CampaignSpec::at_point(size_t point) const {
  CampaignSpec s = *this;
  const auto vals = point_values(point);
  for (size_t i = 0; i < axes.size(); ++i) apply_field(s, axes[i].field, vals[i]);
  s.axes.clear();
  return s;
}

void CampaignSpec::validate() const {
  if (trials < 1) throw ConfigError("trials", "must be >= 1");
  for (const auto& a : axes) {
    const auto& f = sweep_fields();
    if (std::find(f.begin(), f.end(), a.field) == f.end())
      throw ConfigError(a.field, "not a sweepable field");
    if (a.values.empty()) throw ConfigError(a.field, "sweep axis has no values");
  }
  if (kind == ExperimentKind::TraceReplay && params.trace_path.empty())
    throw ConfigError("trace", "trace_replay needs a trace path");
  for (size_t p = 0; p < points(); ++p) {
    const CampaignSpec s = at_point(p);
    s.cache.validate();
    s.remap.validate();
    s.detector.validate();
    if (s.kind == ExperimentKind::EvRate && s.params.probes < 1)
      throw ConfigError("probes", "must be >= 1");
  }
}

nlohmann::json to_json(const CampaignSpec& s) {
  nlohmann::json j;
  j["kind"] = to_string(s.kind);
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  j["cache"] = {{"sets", s.cache.llc_sets},         {"ways", s.cache.llc_ways},
                {"partitions", s.cache.partitions}, {"replacement", to_string(s.cache.replacement)},
                {"l1_sets", s.cache.l1_sets},       {"l1_ways", s.cache.l1_ways},
                {"cores", s.cache.cores}};
  j["remap"] = {{"enabled", s.remap.enabled},
                {"metric", to_string(s.remap.metric)},
                {"period", s.remap.period_per_block},
                {"relocation", to_string(s.remap.relocation)},
                {"relocation_rate", s.remap.relocation_rate},
                {"chain_cap", s.remap.chain_cap}};
  j["detector"] = {{"enabled", s.detector.enabled},
                   {"sample_period", s.detector.sample_period},
                   {"alpha", s.detector.alpha},
                   {"threshold", s.detector.threshold}};
  const auto& p = s.params;
  j["params"] = {{"set_size", p.set_size},
                 {"probes", p.probes},
                 {"flush_after_probe", p.flush_after_probe},
                 {"budget_accesses", p.budget_accesses},
                 {"budget_evictions", p.budget_evictions},
                 {"warm_up", p.warm_up},
                 {"stop_on_remap", p.stop_on_remap},
                 {"attack", to_string(p.attack)},
                 {"frequency", p.frequency},
                 {"trace", p.trace_path}};
  j["sweep"] = nlohmann::json::array();
  for (const auto& a : s.axes) j["sweep"].push_back({{"field", a.field}, {"values", a.values}});
  return j;
}

namespace {

/// Visits every key of `obj`, rejecting keys the visitor does not consume.
template <typename Fn>
void read_object(const nlohmann::json& obj, const std::string& where, Fn&& fn) {
  if (!obj.is_object()) throw ConfigError(where, "must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const std::string name = where.empty() ? it.key() : where + "." + it.key();
    try {
      if (!fn(it.key(), it.value())) throw ConfigError(name, "unknown key");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(name, e.what());
    }
  }
}

}  // namespace

CampaignSpec spec_from_json(const nlohmann::json& j) {
  CampaignSpec s;
  read_object(j, "", [&](const std::string& k, const nlohmann::json& v) {
    if (k == "kind") s.kind = parse_kind(v.get<std::string>());
    else if (k == "trials") s.trials = v.get<uint32_t>();
    else if (k == "seed") s.seed = v.get<uint64_t>();
    else if (k == "cache")
      read_object(v, "cache", [&](const std::string& k2, const nlohmann::json& v2) {
        if (k2 == "sets") s.cache.llc_sets = v2.get<uint32_t>();
        else if (k2 == "ways") s.cache.llc_ways = v2.get<uint32_t>();
        else if (k2 == "partitions") s.cache.partitions = v2.get<uint32_t>();
        else if (k2 == "replacement") s.cache.replacement = parse_replacement(v2.get<std::string>(), "cache.replacement");
        else if (k2 == "l1_sets") s.cache.l1_sets = v2.get<uint32_t>();
        else if (k2 == "l1_ways") s.cache.l1_ways = v2.get<uint32_t>();
        else if (k2 == "cores") s.cache.cores = v2.get<uint32_t>();
        else return false;
        return true;
      });
    else if (k == "remap")
      read_object(v, "remap", [&](const std::string& k2, const nlohmann::json& v2) {
        if (k2 == "enabled") s.remap.enabled = v2.get<bool>();
        else if (k2 == "metric") s.remap.metric = parse_metric(v2.get<std::string>(), "remap.metric");
        else if (k2 == "period") s.remap.period_per_block = v2.get<uint32_t>();
        else if (k2 == "relocation") s.remap.relocation = parse_relocation(v2.get<std::string>(), "remap.relocation");
        else if (k2 == "relocation_rate") s.remap.relocation_rate = v2.get<uint32_t>();
        else if (k2 == "chain_cap") s.remap.chain_cap = v2.get<uint32_t>();
        else return false;
        return true;
      });
    else if (k == "detector")
      read_object(v, "detector", [&](const std::string& k2, const nlohmann::json& v2) {
        if (k2 == "enabled") s.detector.enabled = v2.get<bool>();
        else if (k2 == "sample_period") s.detector.sample_period = v2.get<uint64_t>();
        else if (k2 == "alpha") s.detector.alpha = v2.get<double>();
        else if (k2 == "threshold") s.detector.threshold = v2.get<double>();
        else return false;
        return true;
      });
    else if (k == "params")
      read_object(v, "params", [&](const std::string& k2, const nlohmann::json& v2) {
        auto& p = s.params;
        if (k2 == "set_size") p.set_size = v2.get<uint64_t>();
        else if (k2 == "probes") p.probes = v2.get<uint32_t>();
        else if (k2 == "flush_after_probe") p.flush_after_probe = v2.get<bool>();
        else if (k2 == "budget_accesses") p.budget_accesses = v2.get<uint64_t>();
        else if (k2 == "budget_evictions") p.budget_evictions = v2.get<uint64_t>();
        else if (k2 == "warm_up") p.warm_up = v2.get<bool>();
        else if (k2 == "stop_on_remap") p.stop_on_remap = v2.get<bool>();
        else if (k2 == "attack") p.attack = parse_attack(v2.get<std::string>(), "params.attack");
        else if (k2 == "frequency") p.frequency = v2.get<double>();
        else if (k2 == "trace") p.trace_path = v2.get<std::string>();
        else return false;
        return true;
      });
    else if (k == "sweep") {
      if (!v.is_array()) throw ConfigError("sweep", "must be an array");
      for (const auto& a : v) {
        SweepAxis axis;
        read_object(a, "sweep", [&](const std::string& k2, const nlohmann::json& v2) {
          if (k2 == "field") axis.field = v2.get<std::string>();
          else if (k2 == "values") axis.values = v2.get<std::vector<double>>();
          else return false;
          return true;
        });
        s.axes.push_back(std::move(axis));
      }
    } else {
      return false;
    }
    return true;
  });
  return s;
}

uint64_t spec_hash(const CampaignSpec& spec) {
  // FNV-1a over the canonical dump, finished with a mixer.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(spec).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

uint64_t trial_seed(uint64_t campaign_seed, size_t point, uint32_t trial) {
  return mix64(mix64(campaign_seed ^ 0x5eedULL) ^ (uint64_t{point} << 32 | trial));
}

namespace {

SearchResult run_search(AttackKind attack, HierarchyView& view, const CampaignSpec& s) {
  const SearchBudget budget{s.params.budget_accesses, s.params.budget_evictions};
  const uint64_t blocks = s.cache.llc_blocks();
  const uint64_t L = s.params.set_size ? s.params.set_size : s.cache.llc_ways;
  switch (attack) {
    case AttackKind::Ct:
      return ct_search(view, L, budget);
    case AttackKind::Ppt: {
      PptParams p;
      p.prime_size = blocks * 3 / 2;
      return ppt_search(view, L, budget, p);
    }
    case AttackKind::Ge: {
      GeParams p;
      p.ways = s.cache.llc_ways;
      p.initial_size = 2 * blocks;
      p.growth_step = std::max<size_t>(blocks / 8, 1);
      p.max_size = 4 * blocks;
      return ge_search(view, p, budget);
    }
  }
  return {};
}

void fill_counters(TrialRow& row, const Hierarchy& h, const CounterSnapshot& base) {
  const auto& c = h.counters();
  row.llc_accesses = c.llc_accesses - base.llc_accesses;
  row.llc_demand_evictions = c.llc_demand_evictions - base.llc_demand_evictions;
  row.remaps = c.remaps_started() - base.remaps_started();
  row.detector_firings = c.detector_firings - base.detector_firings;
}

}  // namespace

TrialRow run_trial(const CampaignSpec& s, uint32_t trial, uint64_t seed) {
  TrialRow row;
  row.trial = trial;
  row.seed = seed;

  HierarchyOptions opts;
  opts.cache = s.cache;
  opts.remap = s.remap;
  opts.detector = s.detector;
  opts.seed = mix64(seed ^ 0x68696572ULL);

  if (s.kind == ExperimentKind::Analytic) {
    const uint64_t L = s.params.set_size ? s.params.set_size : s.cache.llc_ways;
    const auto est = expected_attack_time(s.remap.period_per_block, L, s.cache.llc_sets,
                                          s.cache.llc_ways, s.cache.partitions,
                                          s.params.frequency);
    row.value = est.expected_time;
    row.aux = est.success_prob;
    row.outcome = est.beyond_horizon ? to_string(Magnitude::BeyondHundredYears)
                                     : to_string(classify_duration(est.expected_time));
    return row;
  }
  if (s.kind == ExperimentKind::TraceReplay) {
    opts.seed = seed;
    const TraceReport rep = replay_trace(s.params.trace_path, opts);
    row.outcome = "replayed";
    row.llc_accesses = rep.counters.llc_accesses;
    row.llc_demand_evictions = rep.counters.llc_demand_evictions;
    row.remaps = rep.remaps_by_period + rep.remaps_by_detector;
    row.detector_firings = rep.detector_firings;
    row.value = rep.mpki_proxy;
    row.aux = static_cast<double>(rep.references);
    return row;
  }

  Hierarchy h(opts);
  std::mt19937_64 rng(seed);

  if (s.kind == ExperimentKind::Retention) {
    // Fill every LLC slot, then run one remap to completion.
    const uint64_t blocks = s.cache.llc_blocks();
    // Without flushes, occupancy is fills minus demand evictions.
    auto filled = [&h] { return h.counters().llc_misses - h.counters().llc_demand_evictions; };
    for (uint64_t i = 0; filled() < blocks && i < 64 * blocks; ++i) h.access(kVictimCore, rng());
    const CounterSnapshot base = h.counters();
    h.force_remap();
    h.finish_remap();
    fill_counters(row, h, base);
    const RemapState& st = h.remap().state();
    row.outcome = "remapped";
    row.value = st.valid_at_start ? static_cast<double>(st.retained) / st.valid_at_start : 0.0;
    row.aux = static_cast<double>(st.relocations);
    return row;
  }

  if (s.params.warm_up) warm_up(h, 2 * s.cache.llc_blocks(), rng);
  const uint64_t target = rng();
  HierarchyView view(h, target, rng());
  const CounterSnapshot base = h.counters();

  if (s.kind == ExperimentKind::EvRate) {
    const uint64_t L = s.params.set_size ? s.params.set_size : s.cache.llc_ways;
    const EvictionSet set = build_partial_set(h, target, L, rng);
    row.value = measure_eviction_rate(view, set, s.params.probes, s.params.flush_after_probe);
    row.aux = static_cast<double>(s.params.probes);
    row.outcome = "measured";
    fill_counters(row, h, base);
    return row;
  }

  AttackKind attack = s.params.attack;
  if (s.kind == ExperimentKind::SearchCt) attack = AttackKind::Ct;
  if (s.kind == ExperimentKind::SearchPpt) attack = AttackKind::Ppt;
  if (s.kind == ExperimentKind::SearchGe) attack = AttackKind::Ge;
  view.stop_on_remap(s.params.stop_on_remap);
  const SearchResult r = run_search(attack, view, s);
  fill_counters(row, h, base);
  // A set only counts if it still works once any remap it provoked is done.
  h.finish_remap();
  size_t congruent = 0;
  for (uint64_t m : r.set.members) congruent += is_congruent(h, m, target);
  const bool usable = r.found && congruent == r.set.size();
  row.value = usable ? 1.0 : 0.0;
  row.aux = static_cast<double>(congruent);
  row.rounds = r.rounds;
  if (usable) row.outcome = "found";
  else if (r.found) row.outcome = "stale";
  else if (view.halted()) row.outcome = "halted";
  else if (SearchBudget{s.params.budget_accesses, s.params.budget_evictions}.exceeded(r.used))
    row.outcome = "budget";
  else row.outcome = "failed";
  return row;
}

unsigned default_jobs() {
  if (const char* e = std::getenv("CACHESIM_JOBS")) {
    const long v = std::strtol(e, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CampaignResult run_campaign(const CampaignSpec& spec, unsigned jobs) {
  spec.validate();
  CampaignResult result;
  result.kind = spec.kind;
  result.spec_hash = spec_hash(spec);
  for (const auto& a : spec.axes) result.axis_names.push_back(a.field);

  const size_t points = spec.points();
  std::vector<CampaignSpec> resolved;
  resolved.reserve(points);
  for (size_t p = 0; p < points; ++p) resolved.push_back(spec.at_point(p));

  const size_t total = points * spec.trials;
  result.rows.resize(total);
  std::atomic<size_t> next{0};
  std::mutex err_mu;
  size_t err_index = total;
  std::exception_ptr err;

  auto worker = [&] {
    for (size_t i = next++; i < total; i = next++) {
      const size_t p = i / spec.trials;
      const auto t = static_cast<uint32_t>(i % spec.trials);
      try {
        TrialRow row = run_trial(resolved[p], t, trial_seed(spec.seed, p, t));
        row.point = spec.point_values(p);
        row.point_index = static_cast<uint32_t>(p);
        result.rows[i] = std::move(row);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };

  if (jobs == 0) jobs = default_jobs();
  jobs = static_cast<unsigned>(std::min<size_t>(jobs, total));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return result;
}

}  // namespace rcache
