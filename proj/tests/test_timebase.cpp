#include <cmath>
#include <vector>

#include "doctest.h"
#include "switchpair/rng.hpp"
#include "switchpair/timebase.hpp"

using namespace switchpair;

TEST_CASE("quantize maps the epoch to tick zero") {
  CHECK(quantize(0.0, 120.0) == Tick{0});
}

TEST_CASE("quantize bins by whole tolerance intervals") {
  // Hand check: 66 * 120 = 7920 <= 8000 < 8040 = 67 * 120.
  CHECK(quantize(8000.0, 120.0) == Tick{66});
  // One full 50 ms cycle advances exactly one tick.
  CHECK(quantize(50.0, 50.0) == Tick{1});
  CHECK(quantize(49.999, 50.0) == Tick{0});
}

TEST_CASE("quantize rejects bad input") {
  CHECK_THROWS_AS(quantize(-1.0, 120.0), InvalidInputError);
  CHECK_THROWS_AS(quantize(std::nan(""), 120.0), InvalidInputError);
  CHECK_THROWS_AS(quantize(std::numeric_limits<double>::infinity(), 120.0),
                  InvalidInputError);
  CHECK_THROWS_AS(quantize(100.0, 0.0), InvalidInputError);
  CHECK_THROWS_AS(quantize(100.0, -5.0), InvalidInputError);
}

TEST_CASE("quantize is monotone and constant within a bin") {
  rng::Stream stream(99, rng::Purpose::Trial);
  for (int i = 0; i < 2000; ++i) {
    const double tau = stream.uniform(1.0, 300.0);
    const double t1 = stream.uniform(0.0, 1e6);
    const double t2 = stream.uniform(0.0, 1e6);
    const auto lo = std::min(t1, t2);
    const auto hi = std::max(t1, t2);
    CHECK(quantize(lo, tau).index <= quantize(hi, tau).index);

    // Two times inside the same half-open bin get the same tick.
    const std::uint64_t k = quantize(t1, tau).index;
    const double inside = stream.uniform(static_cast<double>(k) * tau,
                                         static_cast<double>(k + 1) * tau);
    CHECK(quantize(inside, tau) == quantize(static_cast<double>(k) * tau, tau));
  }
}

TEST_CASE("times within tau differ by at most one tick") {
  rng::Stream stream(7, rng::Purpose::Trial);
  for (int i = 0; i < 2000; ++i) {
    const double tau = stream.uniform(10.0, 200.0);
    const double t = stream.uniform(0.0, 1e5);
    const double jitter = stream.uniform(0.0, tau * 0.999);
    const auto a = quantize(t, tau).index;
    const auto b = quantize(t + jitter, tau).index;
    CHECK(b - a <= 1);  // equality is not guaranteed at bin edges
  }
}

TEST_CASE("common delay tolerance is the max precision") {
  const std::vector<DevicePrecision> two{{50.0}, {120.0}};
  CHECK(common_delay_tolerance(two) == 120.0);

  const std::vector<DevicePrecision> same{{50.0}, {50.0}, {50.0}};
  CHECK(common_delay_tolerance(same) == 50.0);

  const std::vector<DevicePrecision> three{{120.0}, {140.0}, {200.0}};
  // Exhaustive comparison oracle.
  double expected = three[0].tp_ms;
  for (const auto& p : three)
    if (p.tp_ms > expected) expected = p.tp_ms;
  CHECK(common_delay_tolerance(three) == expected);
  CHECK(common_delay_tolerance(three) == 200.0);
}

TEST_CASE("common delay tolerance is permutation invariant and an element") {
  rng::Stream stream(3, rng::Purpose::Trial);
  for (int i = 0; i < 200; ++i) {
    std::vector<DevicePrecision> ps;
    const int m = 2 + static_cast<int>(stream.next_u64() % 5);
    for (int d = 0; d < m; ++d) ps.push_back({stream.uniform(1.0, 300.0)});
    const double tol = common_delay_tolerance(ps);

    bool member = false;
    for (const auto& p : ps) member = member || p.tp_ms == tol;
    CHECK(member);

    // Rotate and compare.
    std::vector<DevicePrecision> rotated(ps.begin() + 1, ps.end());
    rotated.push_back(ps.front());
    CHECK(common_delay_tolerance(rotated) == tol);
  }
}

TEST_CASE("common delay tolerance needs two devices and positive inputs") {
  const std::vector<DevicePrecision> one{{50.0}};
  CHECK_THROWS_AS(common_delay_tolerance(one), InvalidInputError);
  const std::vector<DevicePrecision> bad{{50.0}, {0.0}};
  CHECK_THROWS_AS(common_delay_tolerance(bad), InvalidInputError);
}
