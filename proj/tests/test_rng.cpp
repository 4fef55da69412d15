#include <cmath>
#include <vector>

#include "doctest.h"
#include "porogen/rng.hpp"

using porogen::CounterRng;

TEST_CASE("same seed replays the same sequence") {
  CounterRng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams are distinct") {
  CounterRng a(42, 0), b(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i) same += a.next_u64() == b.next_u64();
  CHECK(same == 0);
}

TEST_CASE("derive matches an independently derived stream") {
  CounterRng parent(7, 3);
  CounterRng c1 = parent.derive(11);
  CounterRng c2 = parent.derive(11);
  for (int i = 0; i < 16; ++i) CHECK(c1.next_u64() == c2.next_u64());
}

TEST_CASE("uniform doubles stay in range with a sane mean") {
  CounterRng rng(1);
  double acc = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    acc += u;
  }
  CHECK(std::abs(acc / n - 0.5) < 0.01);
}

TEST_CASE("next_below is uniform over a small range") {
  CounterRng rng(3);
  const int bound = 7;
  std::vector<int> hist(bound, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++hist[rng.next_below(bound)];
  for (int c : hist) {
    CHECK(c > n / bound - 600);
    CHECK(c < n / bound + 600);
  }
}

TEST_CASE("normals have standard moments") {
  CounterRng rng(5);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum2 / n - 1.0) < 0.03);
}
