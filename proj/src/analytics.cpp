#include "rcache/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

namespace rcache {

namespace {

double log_binomial_pmf(uint64_t n, double p, uint64_t i) {
  const double dn = static_cast<double>(n);
  const double di = static_cast<double>(i);
  return std::lgamma(dn + 1) - std::lgamma(di + 1) - std::lgamma(dn - di + 1) + di * std::log(p) +
         (dn - di) * std::log1p(-p);
}

}  // namespace

double binomial_upper_tail(uint64_t n, double p, uint64_t k) {
  if (k == 0) return 1.0;
  if (k > n || p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double odds = p / (1.0 - p);
  const double mean = static_cast<double>(n) * p;

  if (static_cast<double>(k) > mean) {
    // Upper tail is the small side; terms fall off geometrically past the mode.
    double term = std::exp(log_binomial_pmf(n, p, k));
    double sum = term;
    for (uint64_t i = k; i < n && term > sum * 1e-17; ++i) {
      term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
      sum += term;
    }
    return std::min(sum, 1.0);
  }
  double term = std::exp(log_binomial_pmf(n, p, k - 1));
  double sum = term;
  for (uint64_t i = k - 1; i > 0 && term > sum * 1e-17; --i) {
    term *= static_cast<double>(i) / static_cast<double>(n - i + 1) / odds;
    sum += term;
  }
  return std::clamp(1.0 - sum, 0.0, 1.0);
}

double p_conflict_lru(uint64_t M, uint64_t S, uint32_t W) {
  if (S == 0 || W == 0) throw std::invalid_argument("p_conflict_lru: S and W must be positive");
  return binomial_upper_tail(M, 1.0 / static_cast<double>(S), W);
}

namespace {

uint64_t collect_threshold(uint64_t L, uint32_t W, uint32_t K) {
  if (K == 0 || W % K != 0) throw std::invalid_argument("partitions must divide ways");
  return L * (W / K);
}

}  // namespace

double p_collect(uint64_t E, uint64_t L, uint64_t S, uint32_t W, uint32_t K) {
  const uint64_t threshold = collect_threshold(L, W, K);
  if (threshold == 0) throw std::invalid_argument("L*W/K must be at least 1");
  return binomial_upper_tail(E, 1.0 / (static_cast<double>(S) * K), threshold);
}

AttackTimeEstimate expected_attack_time(uint32_t n, uint64_t L, uint64_t S, uint32_t W, uint32_t K,
                                        double frequency) {
  AttackTimeEstimate est;
  est.period_per_block = n;
  est.frequency = frequency;
  est.evictions_per_period = uint64_t{n} * S * W;
  const uint64_t E = est.evictions_per_period;
  const uint64_t T = collect_threshold(L, W, K);
  const double P = 1.0 / (static_cast<double>(S) * K);
  est.success_prob = p_collect(E, L, S, W, K);
  const double p = est.success_prob;
  const double horizon = 100 * kSecondsPerYear;
  if (p <= 0.0) {
    est.expected_time = est.geometric_time = INFINITY;
    est.beyond_horizon = true;
    return est;
  }
  est.geometric_time = static_cast<double>(E) / (frequency * p);
  // Failed periods cost E evictions each; the successful one ends at the
  // T-th target-set eviction N, with E[N; N <= E] = T/P * P(Bin(E+1,P) >= T+1).
  const double in_period =
      static_cast<double>(T) / P * binomial_upper_tail(E + 1, P, T + 1) / p;
  est.expected_time = ((1.0 - p) / p * static_cast<double>(E) + in_period) / frequency;
  est.beyond_horizon = !(est.expected_time <= horizon);
  return est;
}

Magnitude classify_duration(double seconds) {
  if (seconds < 0.1) return Magnitude::Milliseconds;
  if (seconds < 1800) return Magnitude::Seconds;
  if (seconds < 30 * 24 * 3600.0) return Magnitude::Hours;
  if (seconds <= 100 * kSecondsPerYear) return Magnitude::Years;
  return Magnitude::BeyondHundredYears;
}

std::string to_string(Magnitude m) {
  switch (m) {
    case Magnitude::Milliseconds: return "ms";
    case Magnitude::Seconds: return "s";
    case Magnitude::Hours: return "h";
    case Magnitude::Years: return "y";
    case Magnitude::BeyondHundredYears: return ">100y";
  }
  return "?";
}

std::string format_duration(double seconds) {
  char buf[32];
  switch (classify_duration(seconds)) {
    case Magnitude::Milliseconds: std::snprintf(buf, sizeof buf, "%.2gms", seconds * 1e3); break;
    case Magnitude::Seconds: std::snprintf(buf, sizeof buf, "%.2gs", seconds); break;
    case Magnitude::Hours: std::snprintf(buf, sizeof buf, "%.2gh", seconds / 3600); break;
    case Magnitude::Years:
      std::snprintf(buf, sizeof buf, "%.3gy", seconds / kSecondsPerYear);
      break;
    case Magnitude::BeyondHundredYears: return ">100y";
  }
  return buf;
}

namespace {

/// One (set, partition) group of the LLC. Ids: 0 target, 1..L members,
/// negative ids are unrelated resident lines.
class Group {
 public:
  explicit Group(uint32_t ways) : id_(ways), stamp_(ways) {}

  /// Fills the group with unrelated lines, optionally the target as MRU.
  void reset(bool with_target) {
    for (size_t w = 0; w < id_.size(); ++w) {
      id_[w] = -1 - static_cast<int64_t>(w);
      stamp_[w] = w;
    }
    now_ = id_.size();
    if (with_target) {
      id_[0] = 0;
      stamp_[0] = now_++;
    }
  }

  bool holds(int64_t id) const { return std::find(id_.begin(), id_.end(), id) != id_.end(); }

  /// Fills `id`, returning the displaced id or kEmpty.
  template <typename Rng>
  int64_t fill(int64_t id, Replacement policy, Rng& rng) {
    size_t way = id_.size();
    for (size_t w = 0; w < id_.size(); ++w)
      if (id_[w] == kEmpty) {
        way = w;
        break;
      }
    if (way == id_.size()) {
      if (policy == Replacement::Lru)
        way = std::min_element(stamp_.begin(), stamp_.end()) - stamp_.begin();
      else
        way = std::uniform_int_distribution<size_t>(0, id_.size() - 1)(rng);
    }
    const int64_t out = id_[way];
    id_[way] = id;
    stamp_[way] = now_++;
    return out;
  }

  void drop(int64_t id) {
    for (auto& x : id_)
      if (x == id) x = kEmpty;
  }

  static constexpr int64_t kEmpty = INT64_MIN;

 private:
  std::vector<int64_t> id_;
  std::vector<uint64_t> stamp_;
  uint64_t now_ = 0;
};

}  // namespace

double mc_eviction_rate(uint64_t L, uint64_t S, uint32_t W, uint32_t K, uint32_t trials,
                        uint64_t seed, Replacement policy, bool flush_after_probe,
                        uint32_t trials_per_set) {
  if (K == 0 || W % K != 0) throw std::invalid_argument("partitions must divide ways");
  if (trials == 0 || L == 0) return 0.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<uint32_t> part(0, K - 1);
  std::bernoulli_distribution stray(1.0 / static_cast<double>(S));

  // groups[q]: the target's set in partition q. A member reaches groups[q]
  // only when its fill picks partition q and it indexes there.
  std::vector<Group> groups(K, Group(W / K));
  std::vector<std::vector<char>> maps(K, std::vector<char>(L + 1));
  std::vector<int> where(L + 1);  // partition holding the member, -1 elsewhere, -2 uncached
  uint32_t target_part = 0;
  uint64_t evicted = 0;

  for (uint32_t t = 0; t < trials; ++t) {
    if (t % std::max(trials_per_set, 1u) == 0) {
      target_part = part(rng);
      for (uint32_t q = 0; q < K; ++q) groups[q].reset(q == target_part);
      for (uint64_t m = 1; m <= L; ++m) {
        const uint32_t home = part(rng);
        for (uint32_t q = 0; q < K; ++q) maps[q][m] = q == home || stray(rng);
        where[m] = -2;
      }
    }
    // A surviving target stays put and hits in the victim's private cache;
    // an evicted one is refilled into a freshly drawn partition.
    if (!groups[target_part].holds(0)) {
      target_part = part(rng);
      const int64_t out = groups[target_part].fill(0, policy, rng);
      if (out > 0) where[out] = -2;
    }
    for (uint64_t m = 1; m <= L; ++m) {
      // A cached member hits in the private cache and leaves the LLC alone.
      if (where[m] != -2) continue;
      const uint32_t q = part(rng);
      if (!maps[q][m]) {
        where[m] = -1;
        continue;
      }
      where[m] = static_cast<int>(q);
      const int64_t out = groups[q].fill(static_cast<int64_t>(m), policy, rng);
      if (out > 0) where[out] = -2;
    }
    evicted += !groups[target_part].holds(0);
    if (flush_after_probe)
      for (uint64_t m = 1; m <= L; ++m) {
        if (where[m] >= 0) groups[where[m]].drop(static_cast<int64_t>(m));
        where[m] = -2;
      }
  }
  return static_cast<double>(evicted) / trials;
}

ConflictEstimate mc_conflict_lru(uint64_t M, uint64_t S, uint32_t W, uint32_t trials,
                                 uint64_t seed) {
  ConflictEstimate est;
  if (trials == 0) return est;
  std::mt19937_64 rng(seed);
  // Gap (in streamed lines) between consecutive arrivals in the target set.
  std::geometric_distribution<uint64_t> gap(1.0 / static_cast<double>(S));
  std::vector<uint64_t> stamp(W);
  uint64_t hits = 0;
  double total = 0;
  for (uint32_t t = 0; t < trials; ++t) {
    // Way 0 holds the target as most recent; the rest are older lines.
    for (uint32_t w = 0; w < W; ++w) stamp[w] = W - w;
    uint64_t now = W + 1;
    uint64_t line = 0;
    while (true) {
      line += gap(rng) + 1;
      const size_t lru = std::min_element(stamp.begin(), stamp.end()) - stamp.begin();
      stamp[lru] = now++;
      if (lru == 0) break;
    }
    hits += line <= M;
    total += static_cast<double>(line);
  }
  est.probability = static_cast<double>(hits) / trials;
  est.mean_lines_to_eviction = total / trials;
  return est;
}

}  // namespace rcache
