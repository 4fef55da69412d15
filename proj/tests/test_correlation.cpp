#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "porogen/correlation.hpp"
#include "porogen/morphology.hpp"
#include "porogen/synthdata.hpp"

using namespace porogen;

TEST_CASE("all-void volume has probability 1 at every radius") {
  auto vol = VoxelVolume::filled({12, 12, 12}, Phase::Void);
  for (auto est : {TpcEstimator::exhaustive(),
                   TpcEstimator::monte_carlo(2000, 7)}) {
    auto c = two_point_correlation(vol, Phase::Void, 6, est);
    REQUIRE(c.radii.size() == 7);
    for (std::size_t i = 0; i < c.radii.size(); ++i) {
      CHECK(c.probabilities[i] == 1.0);
      CHECK(c.counts[i] > 0);
    }
  }
}

TEST_CASE("bin r=0 equals the phase fraction exactly") {
  auto vol = testutil::random_volume({10, 11, 12}, 0.4, 21);
  auto ex = two_point_correlation_exhaustive(vol, Phase::Void, 3);
  CHECK(ex.probabilities[0] == porosity(vol));
  auto mc = two_point_correlation_monte_carlo(vol, Phase::Solid, 3, 500, 3);
  CHECK(mc.probabilities[0] == phase_fraction(vol, Phase::Solid));
}

TEST_CASE("complement symmetry at r=0") {
  auto vol = testutil::random_volume({9, 9, 9}, 0.33, 4);
  auto v = two_point_correlation_exhaustive(vol, Phase::Void, 2);
  auto s = two_point_correlation_exhaustive(vol, Phase::Solid, 2);
  CHECK(v.probabilities[0] + s.probabilities[0] == 1.0);
}

TEST_CASE("iid Bernoulli field sits at p^2 for r >= 1") {
  const double p = 0.3;
  auto vol = bernoulli_volume(48, p, 12);
  const int max_r = 6;

  auto ex = two_point_correlation_exhaustive(vol, Phase::Void, max_r);
  auto mc = two_point_correlation_monte_carlo(vol, Phase::Void, max_r,
                                              20000, 5);
  for (int r = 1; r <= max_r; ++r) {
    // closed form p^2 with binomial error bars; exhaustive axis pairs
    // overlap at endpoints, which inflates the naive standard error by
    // roughly 2x on an iid field
    const double se_ex =
        2.0 * std::sqrt(p * p * (1 - p * p) / double(ex.counts[r]));
    CHECK(std::abs(ex.probabilities[r] - p * p) < 3.0 * se_ex);
    const double se_mc =
        std::sqrt(p * p * (1 - p * p) / double(mc.counts[r]));
    CHECK(std::abs(mc.probabilities[r] - p * p) < 3.0 * se_mc);
    // estimator agreement
    const double se_both = std::hypot(se_ex, se_mc);
    CHECK(std::abs(ex.probabilities[r] - mc.probabilities[r]) <
          3.0 * se_both);
  }
}

TEST_CASE("probabilities stay within [0,1] on arbitrary volumes") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto vol = testutil::random_volume({8, 6, 10}, 0.5, seed);
    auto c = two_point_correlation_exhaustive(vol, Phase::Void, 5);
    for (double pr : c.probabilities) {
      CHECK(pr >= 0.0);
      CHECK(pr <= 1.0);
    }
  }
}

TEST_CASE("monte carlo is deterministic per seed") {
  auto vol = testutil::random_volume({16, 16, 16}, 0.45, 2);
  auto a = two_point_correlation_monte_carlo(vol, Phase::Void, 5, 4000, 11);
  auto b = two_point_correlation_monte_carlo(vol, Phase::Void, 5, 4000, 11);
  CHECK(a.probabilities == b.probabilities);
  CHECK(a.counts == b.counts);
}

TEST_CASE("max_r beyond the diagonal is rejected") {
  auto vol = VoxelVolume::filled({4, 4, 4}, Phase::Void);
  CHECK_THROWS_AS(two_point_correlation_exhaustive(vol, Phase::Void, 8),
                  std::invalid_argument);
  CHECK_NOTHROW(two_point_correlation_exhaustive(vol, Phase::Void, 6));
}

TEST_CASE("csv serialization") {
  auto vol = VoxelVolume::filled({4, 4, 4}, Phase::Void);
  auto c = two_point_correlation_exhaustive(vol, Phase::Void, 2);
  auto csv = tpc_to_csv(c);
  CHECK(csv.rfind("r,probability,pair_count\n", 0) == 0);
  CHECK(csv.find("\n0,1,64\n") != std::string::npos);
}
