#include "rcache/csv.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace rcache {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& out, const CampaignResult& result) {
  char head[96];
  std::snprintf(head, sizeof head, "# rcache-csv v%d spec=%016" PRIx64 " kind=%s\n", kCsvVersion,
                result.spec_hash, to_string(result.kind));
  out << head;
  for (const auto& a : result.axis_names) out << a << ',';
  out << "trial,seed,outcome,llc_accesses,llc_demand_evictions,remaps,detector_firings,value,aux,"
         "rounds\n";
  for (const TrialRow& r : result.rows) {
    for (double v : r.point) out << num(v) << ',';
    out << r.trial << ',' << r.seed << ',' << r.outcome << ',' << r.llc_accesses << ','
        << r.llc_demand_evictions << ',' << r.remaps << ',' << r.detector_firings << ','
        << num(r.value) << ',' << num(r.aux) << ',' << r.rounds << '\n';
  }
}

std::string to_csv(const CampaignResult& result) {
  std::ostringstream s;
  write_csv(s, result);
  return s.str();
}

}  // namespace rcache
