#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>

#include "rcache/analytics.hpp"

using namespace rcache;

TEST_SUITE("analytics") {

TEST_CASE("conflict probability edge cases") {
  CHECK(p_conflict_lru(0, 64, 4) == 0.0);
  CHECK(p_conflict_lru(2, 1, 2) == 1.0);
  CHECK(p_conflict_lru(1, 1, 2) == 0.0);
}

TEST_CASE("conflict probability matches a single-set LRU simulation") {
  for (uint64_t M : {128, 256, 512}) {
    CAPTURE(M);
    const ConflictEstimate mc = mc_conflict_lru(M, 64, 4, 100'000, M);
    CHECK(std::abs(mc.probability - p_conflict_lru(M, 64, 4)) <= 0.01);
  }
  const ConflictEstimate mc = mc_conflict_lru(512, 64, 4, 100'000, 1);
  CHECK(mc.mean_lines_to_eviction == doctest::Approx(256).epsilon(0.02));
}

TEST_CASE("collection probability edge cases") {
  CHECK(p_collect(0, 1, 1024, 16, 2) == 0.0);
  CHECK(p_collect(5, 3, 1, 2, 1) == 0.0);
  CHECK(p_collect(6, 3, 1, 2, 1) == 1.0);
  CHECK_THROWS_AS(p_collect(100, 4, 1024, 16, 3), std::invalid_argument);
}

TEST_CASE("binomial tail agrees with a reference implementation") {
  struct Case {
    uint64_t n;
    double p;
    uint64_t k;
  };
  const Case cases[] = {
      {10, 0.3, 3},           {100, 0.01, 1},          {512, 1.0 / 64, 4},
      {163'840, 1.0 / 2048, 200}, {1'638'400, 1.0 / 2048, 200}, {327'680, 1.0 / 16384, 90},
      {1'000'000'000, 1e-6, 1000}, {1'000'000'000, 1e-6, 1100}, {5000, 0.5, 2400},
  };
  for (const auto& c : cases) {
    CAPTURE(c.n);
    CAPTURE(c.k);
    const boost::math::binomial dist(static_cast<double>(c.n), c.p);
    const double ref = boost::math::cdf(boost::math::complement(dist, static_cast<double>(c.k - 1)));
    const double got = binomial_upper_tail(c.n, c.p, c.k);
    if (ref > 1e-12)
      CHECK(got == doctest::Approx(ref).epsilon(1e-6));
    else
      CHECK(got < 1e-11);
  }
}

TEST_CASE("monotonicity") {
  double prev = 0;
  for (uint64_t E = 0; E <= 2'000'000; E += 50'000) {
    const double p = p_collect(E, 25, 1024, 16, 2);
    CHECK(p >= prev);
    prev = p;
  }
  for (uint64_t L = 1; L < 60; ++L)
    CHECK(p_collect(400'000, L + 1, 1024, 16, 2) <= p_collect(400'000, L, 1024, 16, 2));
  for (uint32_t K : {1u, 2u, 4u, 8u})
    CHECK(p_collect(400'000, 16, 1024, 16, 2 * K) <= p_collect(400'000, 16, 1024, 16, K));
  prev = 0;
  for (uint64_t M = 0; M < 2000; M += 10) {
    const double p = p_conflict_lru(M, 64, 4);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("attack time estimates") {
  const auto ceaser100 = expected_attack_time(100, 16, 1024, 16, 1);
  CHECK(ceaser100.evictions_per_period == 1'638'400);
  CHECK(classify_duration(ceaser100.expected_time) == Magnitude::Milliseconds);
  CHECK(ceaser100.expected_time < 1e-3);
  CHECK(ceaser100.geometric_time ==
        doctest::Approx(1'638'400.0 / (8e8 * ceaser100.success_prob)));

  const auto ceaser10 = expected_attack_time(10, 16, 1024, 16, 1);
  CHECK(classify_duration(ceaser10.expected_time) == Magnitude::Years);

  const auto skew2_20 = expected_attack_time(20, 25, 1024, 16, 2);
  CHECK(skew2_20.expected_time < 1.0);
  const auto skew2_10 = expected_attack_time(10, 25, 1024, 16, 2);
  CHECK(skew2_10.beyond_horizon);
  CHECK(format_duration(skew2_10.expected_time) == ">100y");
}

TEST_CASE("attack time grows with the partition count") {
  const uint64_t L[] = {16, 25, 45, 68, 90};
  const uint32_t K[] = {1, 2, 4, 8, 16};
  for (uint32_t n : {100u, 50u, 20u, 10u}) {
    double prev = 0;
    for (int i = 0; i < 5; ++i) {
      const auto est = expected_attack_time(n, L[i], 1024, 16, K[i]);
      // Past the horizon the estimates are only a sentinel class.
      if (!est.beyond_horizon) CHECK(est.expected_time >= prev);
      prev = std::max(prev, est.expected_time);
    }
  }
}

TEST_CASE("duration classes") {
  CHECK(classify_duration(0.05) == Magnitude::Milliseconds);
  CHECK(classify_duration(0.5) == Magnitude::Seconds);
  CHECK(classify_duration(4000) == Magnitude::Hours);
  CHECK(classify_duration(3 * kSecondsPerYear) == Magnitude::Years);
  CHECK(classify_duration(200 * kSecondsPerYear) == Magnitude::BeyondHundredYears);
  CHECK(classify_duration(INFINITY) == Magnitude::BeyondHundredYears);
  CHECK(format_duration(3.3e-4) == "0.33ms");
  CHECK(format_duration(3.7 * kSecondsPerYear) == "3.7y");
}

TEST_CASE("eviction rate oracle") {
  CHECK(mc_eviction_rate(16, 1024, 16, 1, 1000, 1) == 1.0);
  CHECK(mc_eviction_rate(30, 1024, 16, 2, 20'000, 2, Replacement::Lru, true, 1) ==
        doctest::Approx(0.50).epsilon(0.06));
  CHECK(mc_eviction_rate(30, 1024, 16, 2, 20'000, 3, Replacement::Lru, true, 1) ==
        doctest::Approx(binomial_upper_tail(30, 0.25, 8)).epsilon(0.05));
  CHECK(mc_eviction_rate(0, 1024, 16, 2, 100, 4) == 0.0);
}

}
