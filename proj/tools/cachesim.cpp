// cachesim: run randomized-LLC attack and defense campaigns, emit CSV.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcache/campaign.hpp"
#include "rcache/csv.hpp"

using namespace rcache;

namespace {

struct Overrides {
  std::string config;
  std::optional<uint32_t> sets, ways, partitions;
  std::optional<std::string> policy, remap_metric, relocation;
  std::optional<uint32_t> remap_period;
  bool detector = false;
  std::optional<double> detector_threshold;
  std::optional<uint32_t> trials;
  std::optional<uint64_t> seed;
  std::string out;
  unsigned jobs = 0;
  std::vector<std::string> sweeps;

  std::optional<uint64_t> set_size;
  std::optional<uint32_t> probes;
  bool no_flush = false;
  std::optional<uint64_t> budget_accesses, budget_evictions;
  bool cold = false;
  bool keep_going = false;
  std::optional<std::string> attack;
  std::optional<uint32_t> chain_cap;
  std::optional<double> frequency;
  std::string trace;
};

SweepAxis parse_sweep(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("sweep", "expected field=v1,v2,... got '" + s + "'");
  SweepAxis a;
  a.field = s.substr(0, eq);
  std::stringstream in(s.substr(eq + 1));
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      a.values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(a.field, "bad sweep value '" + item + "'");
    }
  }
  return a;
}

CampaignSpec build_spec(ExperimentKind kind, const Overrides& o) {
  CampaignSpec s;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("config", "cannot open '" + o.config + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config", e.what());
    }
    s = spec_from_json(j);
  }
  s.kind = kind;
  if (o.sets) s.cache.llc_sets = *o.sets;
  if (o.ways) s.cache.llc_ways = *o.ways;
  if (o.partitions) s.cache.partitions = *o.partitions;
  if (o.policy) s.cache.replacement = parse_replacement(*o.policy, "policy");
  if (o.remap_metric) {
    s.remap.metric = parse_metric(*o.remap_metric, "remap-metric");
    s.remap.enabled = true;
  }
  if (o.remap_period) {
    s.remap.period_per_block = *o.remap_period;
    s.remap.enabled = true;
  }
  if (o.relocation) s.remap.relocation = parse_relocation(*o.relocation, "relocation");
  if (o.chain_cap) s.remap.chain_cap = *o.chain_cap;
  if (o.detector) s.detector.enabled = true;
  if (o.detector_threshold) s.detector.threshold = *o.detector_threshold;
  if (o.trials) s.trials = *o.trials;
  if (o.seed) s.seed = *o.seed;
  if (o.set_size) s.params.set_size = *o.set_size;
  if (o.probes) s.params.probes = *o.probes;
  if (o.no_flush) s.params.flush_after_probe = false;
  if (o.budget_accesses) s.params.budget_accesses = *o.budget_accesses;
  if (o.budget_evictions) s.params.budget_evictions = *o.budget_evictions;
  if (o.cold) s.params.warm_up = false;
  if (o.keep_going) s.params.stop_on_remap = false;
  if (o.attack) s.params.attack = parse_attack(*o.attack, "algo");
  if (o.frequency) s.params.frequency = *o.frequency;
  if (!o.trace.empty()) s.params.trace_path = o.trace;
  for (const auto& sw : o.sweeps) s.axes.push_back(parse_sweep(sw));
  return s;
}

/// One stderr line per sweep point so a terminal user sees the gist.
void summarize(const CampaignResult& r) {
  size_t i = 0;
  while (i < r.rows.size()) {
    size_t j = i;
    double sum = 0;
    std::vector<double> acc;
    while (j < r.rows.size() && r.rows[j].point_index == r.rows[i].point_index) {
      sum += r.rows[j].value;
      acc.push_back(static_cast<double>(r.rows[j].llc_accesses));
      ++j;
    }
    std::sort(acc.begin(), acc.end());
    std::string label;
    for (size_t a = 0; a < r.axis_names.size(); ++a) {
      std::ostringstream s;
      s << r.axis_names[a] << '=' << r.rows[i].point[a] << ' ';
      label += s.str();
    }
    std::fprintf(stderr, "%s%s: trials=%zu mean_value=%.6g median_llc_accesses=%.0f\n",
                 label.c_str(), to_string(r.kind), j - i, sum / static_cast<double>(j - i),
                 acc[acc.size() / 2]);
    i = j;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized last-level cache attack and defense simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;

  app.add_option("--config", o.config, "JSON campaign file; flags below override it");
  app.add_option("--sets", o.sets, "LLC sets per partition (power of two)");
  app.add_option("--ways", o.ways, "LLC ways");
  app.add_option("--partitions", o.partitions, "Skewed partitions (1 = set-associative)");
  app.add_option("--policy", o.policy, "Replacement policy: lru | random");
  app.add_option("--remap-metric", o.remap_metric, "Remap period counts accesses | evictions");
  app.add_option("--remap-period", o.remap_period, "Remap every N events per LLC block");
  app.add_option("--relocation", o.relocation, "Remap relocation: single | multi");
  app.add_option("--chain-cap", o.chain_cap, "Multi-step chain length limit (0 = unlimited)");
  app.add_flag("--detector", o.detector, "Enable the eviction-distribution detector");
  app.add_option("--threshold", o.detector_threshold, "Detector firing threshold");
  app.add_option("--trials", o.trials, "Trials per sweep point");
  app.add_option("--seed", o.seed, "Campaign seed");
  app.add_option("--out", o.out, "CSV output path (default stdout)");
  app.add_option("--jobs", o.jobs, "Worker threads (default $CACHESIM_JOBS or all cores)");
  app.add_option("--sweep", o.sweeps, "Sweep axis field=v1,v2,... (repeatable)");

  auto* evrate = app.add_subcommand("evrate", "Eviction rate of partially congruent sets");
  evrate->add_option("--size", o.set_size, "Members per eviction set");
  evrate->add_option("--probes", o.probes, "Probes per trial");
  evrate->add_flag("--no-flush", o.no_flush, "Keep members cached between probes");

  auto* search = app.add_subcommand("search", "Eviction-set search cost");
  search->add_option("--algo", o.attack, "ct | ppt | ge")->required();
  search->add_option("--size", o.set_size, "Members to collect (ct, ppt)");
  search->add_option("--budget-accesses", o.budget_accesses, "Abort after this many LLC accesses");
  search->add_option("--budget-evictions", o.budget_evictions, "Abort after this many evictions");
  search->add_flag("--cold", o.cold, "Start on an empty cache");
  search->add_flag("--keep-going", o.keep_going, "Do not stop the attack at a remap");

  app.add_subcommand("retention", "Blocks retained by one remap of a full cache");

  auto* detect = app.add_subcommand("detect", "Search success under remap and detection");
  detect->add_option("--attack", o.attack, "ct | ppt | ge");
  detect->add_option("--size", o.set_size, "Members to collect");
  detect->add_option("--budget-accesses", o.budget_accesses, "Abort after this many LLC accesses");

  auto* analytic = app.add_subcommand("analytic", "Closed-form expected attack time");
  analytic->add_option("--size", o.set_size, "Eviction-set size L");
  analytic->add_option("--frequency", o.frequency, "LLC eviction rate in Hz");

  auto* trace = app.add_subcommand("trace", "Replay a `<core> <R|W|F> <hex addr>` trace");
  trace->add_option("path", o.trace, "Trace file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentKind kind = ExperimentKind::EvRate;
    if (*search) {
      const AttackKind a = parse_attack(*o.attack, "algo");
      kind = a == AttackKind::Ct    ? ExperimentKind::SearchCt
             : a == AttackKind::Ppt ? ExperimentKind::SearchPpt
                                    : ExperimentKind::SearchGe;
    } else if (app.got_subcommand("retention")) {
      kind = ExperimentKind::Retention;
    } else if (*detect) {
      kind = ExperimentKind::DetectSweep;
    } else if (*analytic) {
      kind = ExperimentKind::Analytic;
    } else if (*trace) {
      kind = ExperimentKind::TraceReplay;
    }
    const CampaignSpec spec = build_spec(kind, o);
    const CampaignResult result = run_campaign(spec, o.jobs);
    if (o.out.empty()) {
      write_csv(std::cout, result);
    } else {
      std::ofstream out(o.out);
      if (!out) throw ConfigError("out", "cannot write '" + o.out + "'");
      write_csv(out, result);
    }
    summarize(result);
  } catch (const ConfigError& e) {
    std::cerr << "cachesim: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cachesim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
