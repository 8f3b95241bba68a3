#pragma once

#include <cstdint>
#include <string>

#include "rcache/config.hpp"

namespace rcache {

/// P(X >= k) for X ~ Binomial(n, p). Sums whichever tail is small, starting
/// from an lgamma-evaluated term and recurring on term ratios.
double binomial_upper_tail(uint64_t n, double p, uint64_t k);

/// Probability that M uniformly random lines cause at least W conflicts in
/// one set of an S-set LRU cache.
double p_conflict_lru(uint64_t M, uint64_t S, uint32_t W);

/// Probability of collecting L partially congruent lines within E LLC
/// evictions on an S-set, W-way cache with K partitions. Throws
/// std::invalid_argument unless K divides W.
double p_collect(uint64_t E, uint64_t L, uint64_t S, uint32_t W, uint32_t K);

inline constexpr double kDefaultEvictionFrequency = 8e8;
inline constexpr double kSecondsPerYear = 365.25 * 24 * 3600;

struct AttackTimeEstimate {
  uint32_t period_per_block = 0;
  uint64_t evictions_per_period = 0;
  double success_prob = 0;
  double frequency = kDefaultEvictionFrequency;
  /// Expected seconds to a successful search, counting the evictions spent
  /// inside the successful period rather than the whole period.
  double expected_time = 0;
  /// E / (f * p): every period costs all E evictions.
  double geometric_time = 0;
  /// expected_time exceeds 100 years or p underflowed.
  bool beyond_horizon = false;
};

AttackTimeEstimate expected_attack_time(uint32_t n, uint64_t L, uint64_t S, uint32_t W, uint32_t K,
                                        double frequency = kDefaultEvictionFrequency);

enum class Magnitude { Milliseconds, Seconds, Hours, Years, BeyondHundredYears };

/// ms below 0.1 s, s below 30 min, h below 30 days, y up to 100 years.
Magnitude classify_duration(double seconds);
std::string to_string(Magnitude m);
/// Short human form in the class's unit, e.g. "0.3ms", "1.2h", ">100y".
std::string format_duration(double seconds);

/// Eviction rate of a partially congruent set of L lines, simulated on the K
/// (set, partition) groups the target can occupy. Each member is congruent
/// in one uniformly chosen partition and collides in the others with
/// probability 1/S. Members are redrawn every `trials_per_set` trials; with
/// one trial per set this is the fresh-set rate P(Bin(L, 1/K^2) >= W/K).
double mc_eviction_rate(uint64_t L, uint64_t S, uint32_t W, uint32_t K, uint32_t trials,
                        uint64_t seed, Replacement policy = Replacement::Lru,
                        bool flush_after_probe = true, uint32_t trials_per_set = 10);

struct ConflictEstimate {
  double probability = 0;
  /// Mean stream length until the target is evicted.
  double mean_lines_to_eviction = 0;
};

/// Single-set LRU simulation: a resident target, then M random lines over S
/// sets.
ConflictEstimate mc_conflict_lru(uint64_t M, uint64_t S, uint32_t W, uint32_t trials,
                                 uint64_t seed);

}  // namespace rcache
