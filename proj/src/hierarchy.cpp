#include "rcache/hierarchy.hpp"

#include <sstream>
#include <unordered_set>

namespace rcache {

namespace {

IndexKey initial_key(uint64_t seed) {
  std::mt19937_64 rng(mix64(seed ^ 0x6b65792d696e6974ULL));
  return fresh_key(rng);
}

}  // namespace

Hierarchy::Hierarchy(const HierarchyOptions& opts)
    : cfg_(opts.cache),
      rng_(opts.seed),
      llc_(opts.cache.llc_sets, opts.cache.partitions, opts.cache.ways_per_partition()),
      remap_(opts.cache, opts.remap, initial_key(opts.seed)),
      l1_(size_t{opts.cache.cores} * opts.cache.l1_sets * opts.cache.l1_ways) {
  cfg_.validate();
  opts.remap.validate();
  if (opts.detector.enabled) detector_.emplace(cfg_.llc_sets, opts.detector);
}

AccessOutcome Hierarchy::access(uint32_t core, uint64_t line) {
  if (core >= cfg_.cores) throw ConfigError("core", "unknown core id " + std::to_string(core));
  if (l1_lookup(core, line)) {
    ++counters_.l1_hits;
    return {Level::L1Hit, std::nullopt};
  }

  ++counters_.llc_accesses;
  AccessOutcome out;
  if (auto s = find_llc(line)) {
    llc_.touch(*s);
    out.level = Level::LlcHit;
  } else {
    out.level = Level::Miss;
    ++counters_.llc_misses;
    const uint32_t q =
        cfg_.partitions == 1
            ? 0
            : std::uniform_int_distribution<uint32_t>(0, cfg_.partitions - 1)(rng_);
    const FillIndex fi = remap_.fill_index(line, q);
    const Slot slot{{q, fi.set}, llc_.victim({q, fi.set}, cfg_.replacement, rng_)};
    const BlockMeta& old = llc_.at(slot);
    if (old.valid) {
      l1_invalidate_all(old.tag);
      ++counters_.llc_demand_evictions;
      out.llc_eviction = slot.group;
      if (detector_) detector_->record_eviction(slot.group.set);
    }
    llc_.place(slot, line, fi.remapped);
  }
  l1_fill(core, line);

  bool fired = false;
  if (detector_) {
    if (auto report = detector_->record_access()) {
      ++counters_.detector_windows;
      if (report->fired) {
        ++counters_.detector_firings;
        fired = true;
      }
    }
  }

  if (remap_.active()) {
    advance_remap(remap_.policy().relocation_rate);
  } else if (auto cause = remap_.maybe_trigger(counters_, fired); cause != TriggerCause::None) {
    start_remap(cause);
  }
  return out;
}

void Hierarchy::flush(uint64_t line) {
  l1_invalidate_all(line);
  if (auto s = find_llc(line)) llc_.at(*s).valid = false;
}

bool Hierarchy::is_cached_llc(uint64_t line) const { return find_llc(line).has_value(); }

bool Hierarchy::is_cached_l1(uint32_t core, uint64_t line) const {
  const L1Line* set = l1_set(core, line);
  for (uint32_t w = 0; w < cfg_.l1_ways; ++w)
    if (set[w].valid && set[w].tag == line) return true;
  return false;
}

std::optional<Slot> Hierarchy::llc_location(uint64_t line) const { return find_llc(line); }

std::vector<uint32_t> Hierarchy::llc_sets_of(uint64_t line) const {
  std::vector<uint32_t> sets(cfg_.partitions);
  for (uint32_t q = 0; q < cfg_.partitions; ++q)
    sets[q] = derive_index(remap_.current_key(), q, line, cfg_.llc_sets);
  return sets;
}

void Hierarchy::force_remap() {
  if (!remap_.active()) start_remap(TriggerCause::Period);
}

void Hierarchy::finish_remap() {
  if (remap_.active()) advance_remap(cfg_.llc_sets);
}

std::optional<Slot> Hierarchy::find_llc(uint64_t line) const {
  for (uint32_t q = 0; q < cfg_.partitions; ++q) {
    const IndexResolution r = remap_.resolve_index(line, q);
    if (int w = llc_.find({q, r.first}, line); w >= 0)
      return Slot{{q, r.first}, static_cast<uint32_t>(w)};
    if (r.retry) {
      if (int w = llc_.find({q, *r.retry}, line); w >= 0)
        return Slot{{q, *r.retry}, static_cast<uint32_t>(w)};
    }
  }
  return std::nullopt;
}

Hierarchy::L1Line* Hierarchy::l1_set(uint32_t core, uint64_t line) {
  const size_t set = line & (cfg_.l1_sets - 1);
  return l1_.data() + (size_t{core} * cfg_.l1_sets + set) * cfg_.l1_ways;
}

const Hierarchy::L1Line* Hierarchy::l1_set(uint32_t core, uint64_t line) const {
  const size_t set = line & (cfg_.l1_sets - 1);
  return l1_.data() + (size_t{core} * cfg_.l1_sets + set) * cfg_.l1_ways;
}

bool Hierarchy::l1_lookup(uint32_t core, uint64_t line) {
  L1Line* set = l1_set(core, line);
  for (uint32_t w = 0; w < cfg_.l1_ways; ++w) {
    if (set[w].valid && set[w].tag == line) {
      set[w].stamp = ++l1_clock_;
      return true;
    }
  }
  return false;
}

void Hierarchy::l1_fill(uint32_t core, uint64_t line) {
  L1Line* set = l1_set(core, line);
  uint32_t victim = 0;
  for (uint32_t w = 0; w < cfg_.l1_ways; ++w) {
    if (!set[w].valid) {
      victim = w;
      break;
    }
    if (set[w].stamp < set[victim].stamp) victim = w;
  }
  set[victim] = {line, true, ++l1_clock_};
}

void Hierarchy::l1_invalidate_all(uint64_t line) {
  for (uint32_t c = 0; c < cfg_.cores; ++c) {
    L1Line* set = l1_set(c, line);
    for (uint32_t w = 0; w < cfg_.l1_ways; ++w)
      if (set[w].valid && set[w].tag == line) set[w].valid = false;
  }
}

void Hierarchy::on_remap_evict(const BlockMeta& b) {
  l1_invalidate_all(b.tag);
  ++counters_.llc_remap_evictions;
}

void Hierarchy::start_remap(TriggerCause cause) {
  if (cause == TriggerCause::Detector)
    ++counters_.remaps_by_detector;
  else
    ++counters_.remaps_by_period;
  remap_.begin(llc_, counters_, fresh_key(rng_));
  if (detector_) detector_->reset();
  advance_remap(remap_.policy().relocation_rate);
}

void Hierarchy::advance_remap(uint32_t n_sets) {
  const bool done = remap_.step_remap(
      llc_, n_sets, rng_, [this](const BlockMeta& b, GroupId) { on_remap_evict(b); });
  if (done) ++counters_.remaps_completed;
}

std::string Hierarchy::check_invariants() const {
  std::ostringstream err;
  std::unordered_set<uint64_t> seen;
  for (uint32_t q = 0; q < cfg_.partitions; ++q) {
    for (uint32_t s = 0; s < cfg_.llc_sets; ++s) {
      const GroupId g{q, s};
      for (uint32_t w = 0; w < llc_.ways(); ++w) {
        const BlockMeta& b = llc_.at({g, w});
        if (!b.valid) continue;
        if (!seen.insert(b.tag).second) err << "line " << b.tag << " resident twice\n";
        const auto loc = find_llc(b.tag);
        if (!loc || !(loc->group == g) || loc->way != w)
          err << "line " << b.tag << " not reachable by lookup\n";
        if (!remap_.active() &&
            derive_index(remap_.current_key(), q, b.tag, cfg_.llc_sets) != s)
          err << "line " << b.tag << " resident under a stale index\n";
      }
    }
  }
  for (uint32_t c = 0; c < cfg_.cores; ++c)
    for (uint32_t i = 0; i < cfg_.l1_sets * cfg_.l1_ways; ++i) {
      const L1Line& l = l1_[size_t{c} * cfg_.l1_sets * cfg_.l1_ways + i];
      if (l.valid && !seen.count(l.tag))
        err << "core " << c << " holds line " << l.tag << " absent from the LLC\n";
    }
  return err.str();
}

}  // namespace rcache
