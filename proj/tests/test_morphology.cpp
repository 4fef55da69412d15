#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "porogen/morphology.hpp"
#include "porogen/synthdata.hpp"

using namespace porogen;
using testutil::make_volume;

namespace {

VoxelVolume single_voxel() {
  return VoxelVolume({1, 1, 1}, 1.0, {1});
}

VoxelVolume domino() {
  return make_volume({2, 1, 1}, [](int, int, int) { return std::uint8_t(1); });
}

VoxelVolume block222() {
  return VoxelVolume::filled({2, 2, 2}, Phase::Solid);
}

// One-voxel-thick square ring (3x3 frame) in a single plane.
VoxelVolume square_ring() {
  return make_volume({3, 3, 1}, [](int x, int y, int) {
    return std::uint8_t(!(x == 1 && y == 1));
  });
}

// 4^3 cube with a hollow 2^3 cavity.
VoxelVolume hollow_shell() {
  return make_volume({4, 4, 4}, [](int x, int y, int z) {
    const bool interior = x >= 1 && x <= 2 && y >= 1 && y <= 2 && z >= 1 &&
                          z <= 2;
    return std::uint8_t(interior ? 0 : 1);
  });
}

}  // namespace

TEST_CASE("porosity extremes and exact counts") {
  CHECK(porosity(VoxelVolume::filled({3, 4, 5}, Phase::Void)) == 1.0);
  CHECK(porosity(VoxelVolume::filled({3, 4, 5}, Phase::Solid)) == 0.0);
  auto half = make_volume(
      {4, 4, 4}, [](int x, int, int) { return std::uint8_t(x < 2 ? 0 : 1); });
  CHECK(porosity(half) == 0.5);
}

TEST_CASE("phase fractions sum to one") {
  auto vol = testutil::random_volume({7, 5, 9}, 0.42, 17);
  CHECK(phase_fraction(vol, Phase::Void) + phase_fraction(vol, Phase::Solid) ==
        1.0);
}

TEST_CASE("count_cells on hand-enumerated shapes") {
  CHECK(count_cells(single_voxel(), Phase::Solid) ==
        CellCounts{8, 12, 6, 1});
  // domino: 4 shared vertices, 4 shared edges, 1 shared face
  CHECK(count_cells(domino(), Phase::Solid) == CellCounts{12, 20, 11, 2});
  // 2x2x2 block: full 3x3x3 vertex lattice
  CHECK(count_cells(block222(), Phase::Solid) == CellCounts{27, 54, 36, 8});
  CHECK(count_cells(VoxelVolume::filled({2, 2, 2}, Phase::Void),
                    Phase::Solid) == CellCounts{0, 0, 0, 0});
}

TEST_CASE("count_cells bounds and sharing") {
  auto vol = testutil::random_volume({6, 6, 6}, 0.5, 3);
  auto c = count_cells(vol, Phase::Solid);
  if (c.n3 > 0) {
    CHECK(c.n0 >= 8);
    CHECK(c.n1 >= 12);
    CHECK(c.n2 >= 6);
  }
  CHECK(c.n0 <= 8 * c.n3);
  CHECK(c.n1 <= 12 * c.n3);
  CHECK(c.n2 <= 6 * c.n3);
}

TEST_CASE("minkowski formulas on the frozen examples") {
  auto single = minkowski(CellCounts{8, 12, 6, 1});
  CHECK(single.V == 1.0);
  CHECK(single.S == 6.0);
  CHECK(single.B == 1.5);
  CHECK(single.chi == 1.0);

  auto dom = minkowski(CellCounts{12, 20, 11, 2});
  CHECK(dom.V == 2.0);
  CHECK(dom.S == 10.0);
  CHECK(dom.B == 2.0);
  CHECK(dom.chi == 1.0);

  auto blk = minkowski(CellCounts{27, 54, 36, 8});
  CHECK(blk.V == 8.0);
  CHECK(blk.S == 24.0);
  CHECK(blk.B == 3.0);
  CHECK(blk.chi == 1.0);
}

TEST_CASE("surface equals the brute-force exposed-face count") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto vol = testutil::random_volume({9, 8, 7}, 0.35 + 0.03 * seed, seed);
    auto r = minkowski(count_cells(vol, Phase::Solid));
    CHECK(r.S ==
          double(testutil::brute_force_exposed_faces(vol, Phase::Solid)));
  }
}

TEST_CASE("euler characteristic of canonical topologies") {
  CHECK(minkowski(count_cells(VoxelVolume::filled({8, 8, 8}, Phase::Solid),
                              Phase::Solid))
            .chi == 1.0);
  auto ball = make_volume({16, 16, 16}, [](int x, int y, int z) {
    const double dx = x - 7.5, dy = y - 7.5, dz = z - 7.5;
    return std::uint8_t(dx * dx + dy * dy + dz * dz <= 36.0);
  });
  CHECK(minkowski(count_cells(ball, Phase::Solid)).chi == 1.0);
  CHECK(minkowski(count_cells(square_ring(), Phase::Solid)).chi == 0.0);
  CHECK(minkowski(count_cells(hollow_shell(), Phase::Solid)).chi == 2.0);
}

TEST_CASE("V is additive and padding with void changes nothing") {
  auto vol = testutil::random_volume({5, 6, 4}, 0.4, 11);
  std::int64_t solids = 0;
  for (auto b : vol.data()) solids += b == 1;
  auto c = count_cells(vol, Phase::Solid);
  CHECK(c.n3 == solids);

  // embed with a one-voxel void margin on every side
  auto padded = make_volume({7, 8, 6}, [&](int x, int y, int z) {
    if (x < 1 || y < 1 || z < 1 || x > 5 || y > 6 || z > 4)
      return std::uint8_t(0);
    return vol.at(x - 1, y - 1, z - 1);
  });
  CHECK(count_cells(padded, Phase::Solid) == c);
}

TEST_CASE("cell counts are invariant under axis permutations and flips") {
  auto vol = testutil::random_volume({4, 5, 6}, 0.45, 23);
  const auto base = count_cells(vol, Phase::Solid);
  auto flipped = make_volume({4, 5, 6}, [&](int x, int y, int z) {
    return vol.at(3 - x, y, 5 - z);
  });
  CHECK(count_cells(flipped, Phase::Solid) == base);
  auto transposed = make_volume({6, 4, 5}, [&](int x, int y, int z) {
    return vol.at(y, z, x);
  });
  CHECK(count_cells(transposed, Phase::Solid) == base);
}

TEST_CASE("analyze_volume fills porosity and functionals coherently") {
  auto vol = testutil::random_volume({6, 6, 6}, 0.3, 9);
  auto r = analyze_volume(vol, Phase::Solid);
  CHECK(r.porosity == porosity(vol));
  CHECK(r.V == minkowski(count_cells(vol, Phase::Solid)).V);
}

TEST_CASE("rev_curve shapes and determinism") {
  auto vol = VoxelVolume::filled({40, 40, 40}, Phase::Void);
  auto curve = rev_curve(vol, 40, 10, 8, 5, 99);
  REQUIRE(curve.entries.size() == 4);  // 40, 30, 20, 10
  CHECK(curve.entries.front().size == 40);
  CHECK(curve.entries.back().size == 10);
  for (const auto& e : curve.entries) {
    REQUIRE(e.porosities.size() == 5);
    for (double p : e.porosities) CHECK(p == 1.0);
  }
  auto again = rev_curve(vol, 40, 10, 8, 5, 99);
  for (std::size_t i = 0; i < curve.entries.size(); ++i)
    CHECK(curve.entries[i].porosities == again.entries[i].porosities);
}

TEST_CASE("rev porosity spread shrinks with size on a Bernoulli volume") {
  auto vol = bernoulli_volume(64, 0.3, 31);
  auto curve = rev_curve(vol, 64, 16, 8, 40, 5);
  // compare the largest against the smallest size: variance ~ 1/size^3
  auto spread = [](const std::vector<double>& v) {
    double lo = v[0], hi = v[0];
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    return hi - lo;
  };
  CHECK(spread(curve.entries.front().porosities) <
        spread(curve.entries.back().porosities));
}

TEST_CASE("determine_rev") {
  SUBCASE("constant curve returns the smallest ladder size") {
    RevCurve c;
    for (int size : {30, 20, 10})
      c.entries.push_back({size, {0.3, 0.3, 0.3, 0.3}});
    CHECK(determine_rev(c, 0.05) == 10);
  }
  SUBCASE("only the largest size passes") {
    RevCurve c;
    c.entries.push_back({30, {0.3, 0.3, 0.3, 0.3}});
    c.entries.push_back({20, {0.1, 0.2, 0.4, 0.8}});
    c.entries.push_back({10, {0.3, 0.3, 0.3, 0.3}});
    CHECK(determine_rev(c, 0.05) == 30);
  }
  SUBCASE("REV not reached") {
    RevCurve c;
    c.entries.push_back({30, {0.1, 0.2, 0.4, 0.8}});
    CHECK(!determine_rev(c, 0.05).has_value());
  }
  SUBCASE("validation") {
    RevCurve empty;
    CHECK_THROWS_AS(determine_rev(empty, 0.05), std::invalid_argument);
    RevCurve c;
    c.entries.push_back({10, {0.3}});
    CHECK_THROWS_AS(determine_rev(c, 0.0), std::invalid_argument);
  }
}

TEST_CASE("report serialization") {
  auto r = analyze_volume(single_voxel(), Phase::Solid);
  const auto js = report_to_json(r);
  CHECK(js.find("\"V\": 1.0") != std::string::npos);
  const auto csv = report_to_csv(r);
  CHECK(csv.rfind("porosity,V,S,B,chi\n", 0) == 0);

  RevCurve c;
  c.entries.push_back({4, {0.5, 0.25}});
  const auto ccsv = rev_curve_to_csv(c);
  CHECK(ccsv.find("4,0,0.5") != std::string::npos);
  CHECK(ccsv.find("4,1,0.25") != std::string::npos);
  CHECK(rev_curve_to_json(c).find("\"size\": 4") != std::string::npos);
}
