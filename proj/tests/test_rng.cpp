#include "adastep/problem.hpp"
#include "adastep/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace adastep;

TEST_CASE("rng is reproducible") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("engine matches the standard's mt19937_64 check value") {
  Rng r(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = r.next_u64();
  CHECK(v == 9981545732273789042ULL);
}

TEST_CASE("uniform_index stays in range and covers every value") {
  Rng r(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto k = r.uniform_index(7);
    REQUIRE(k < 7);
    ++hits[k];
  }
  // Binomial(7000, 1/7): sd ~ 29, so 150 is over five sigma.
  for (int h : hits) CHECK(std::abs(h - 1000) < 150);
}

TEST_CASE("uniform01 and normal moments") {
  Rng r(11);
  const int n = 200000;
  double s = 0, s2 = 0, u = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    const double v = r.uniform01();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
    u += v;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(u / n - 0.5) < 0.005);
}

TEST_CASE("derived stream seeds differ") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed = 0; seed < 4; ++seed)
    for (std::uint64_t stream = 0; stream < 4; ++stream) seen.insert(derive_seed(seed, stream));
  CHECK(seen.size() == 16);
  CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST_CASE("sampler draws sorted distinct indices") {
  Sampler s(10, 4, 1);
  for (int i = 0; i < 200; ++i) {
    const Batch b = s.sample();
    REQUIRE(b.size() == 4);
    CHECK(std::is_sorted(b.begin(), b.end()));
    CHECK(std::adjacent_find(b.begin(), b.end()) == b.end());
    CHECK(b.back() < 10);
  }
  Sampler full(5, 5, 9);
  CHECK(full.sample() == Batch{0, 1, 2, 3, 4});
}

TEST_CASE("sampler inclusion frequency is B/n") {
  Sampler s(8, 3, 42);
  std::vector<int> hits(8, 0);
  const int draws = 16000;
  for (int i = 0; i < draws; ++i)
    for (Index k : s.sample()) ++hits[k];
  for (int h : hits) CHECK(std::abs(h / double(draws) - 3.0 / 8.0) < 0.02);
}

TEST_CASE("sampler rejects bad sizes") {
  CHECK_THROWS_AS(Sampler(3, 0, 1), ConfigError);
  CHECK_THROWS_AS(Sampler(3, 4, 1), ConfigError);
}
