#include "rcache/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <string_view>

namespace rcache {

namespace {

std::string_view next_token(std::string_view& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    s = {};
    return {};
  }
  s.remove_prefix(b);
  const size_t e = std::min(s.find_first_of(" \t\r"), s.size());
  std::string_view tok = s.substr(0, e);
  s.remove_prefix(e);
  return tok;
}

}  // namespace

TraceReport replay_trace(std::istream& in, const HierarchyOptions& opts) {
  Hierarchy h(opts);
  TraceReport rep;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view rest(line);
    const std::string_view core_tok = next_token(rest);
    if (core_tok.empty() || core_tok.front() == '#') continue;
    const std::string_view op = next_token(rest);
    std::string_view addr_tok = next_token(rest);
    if (op.empty() || addr_tok.empty()) throw TraceError(lineno, "expected <core> <R|W|F> <addr>");
    if (!next_token(rest).empty()) throw TraceError(lineno, "trailing fields");

    uint32_t core = 0;
    auto [pc, ec] = std::from_chars(core_tok.data(), core_tok.data() + core_tok.size(), core);
    if (ec != std::errc() || pc != core_tok.data() + core_tok.size())
      throw TraceError(lineno, "bad core id '" + std::string(core_tok) + "'");
    if (core >= opts.cache.cores) throw TraceError(lineno, "core id out of range");

    if (addr_tok.size() > 2 && addr_tok[0] == '0' && (addr_tok[1] == 'x' || addr_tok[1] == 'X'))
      addr_tok.remove_prefix(2);
    uint64_t addr = 0;
    auto [pa, ea] = std::from_chars(addr_tok.data(), addr_tok.data() + addr_tok.size(), addr, 16);
    if (ea != std::errc() || pa != addr_tok.data() + addr_tok.size())
      throw TraceError(lineno, "bad address '" + std::string(addr_tok) + "'");

    if (op == "R" || op == "W") {
      h.access(core, addr);
      ++rep.references;
    } else if (op == "F") {
      h.flush(addr);
      ++rep.flushes;
    } else {
      throw TraceError(lineno, "unknown op '" + std::string(op) + "'");
    }
  }
  rep.counters = h.counters();
  rep.remaps_by_period = rep.counters.remaps_by_period;
  rep.remaps_by_detector = rep.counters.remaps_by_detector;
  rep.detector_firings = rep.counters.detector_firings;
  rep.mpki_proxy = rep.references == 0
                       ? 0.0
                       : 1000.0 * static_cast<double>(rep.counters.llc_misses) / rep.references;
  return rep;
}

TraceReport replay_trace(const std::string& path, const HierarchyOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace '" + path + "'");
  return replay_trace(in, opts);
}

}  // namespace rcache
