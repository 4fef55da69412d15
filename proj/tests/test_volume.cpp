#include <array>
#include <cmath>
#include <fstream>
#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "porogen/morphology.hpp"
#include "porogen/volume.hpp"

using namespace porogen;
using testutil::make_volume;
using testutil::TempDir;

TEST_CASE("volume construction validates dims, length and phase bytes") {
  CHECK_THROWS_AS(VoxelVolume({0, 1, 1}, 1.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(VoxelVolume({2, 2, 2}, 1.0, std::vector<std::uint8_t>(7)),
                  std::invalid_argument);
  std::vector<std::uint8_t> bad(8, 0);
  bad[3] = 2;
  CHECK_THROWS(VoxelVolume({2, 2, 2}, 1.0, bad));
}

TEST_CASE("save then load round-trips bit-exactly") {
  TempDir dir("vol_roundtrip");
  auto vol = make_volume({4, 3, 5}, [](int x, int y, int z) {
    return std::uint8_t((x + 2 * y + 3 * z) % 2);
  }, 2.5);
  const auto base = dir.path() / "sample";
  volume_io_save(vol, base);
  const VoxelVolume back = volume_io_load(base);
  CHECK(back.dims() == vol.dims());
  CHECK(back.voxel_size_um() == vol.voxel_size_um());
  CHECK(back.data() == vol.data());

  SUBCASE("all-void cube") {
    auto v = VoxelVolume::filled({4, 4, 4}, Phase::Void);
    volume_io_save(v, dir.path() / "voidcube");
    CHECK(volume_io_load(dir.path() / "voidcube").data() == v.data());
  }
  SUBCASE("path may carry a .json or .raw suffix") {
    CHECK(volume_io_load(dir.path() / "sample.json").data() == vol.data());
    CHECK(volume_io_load(dir.path() / "sample.raw").data() == vol.data());
  }
}

TEST_CASE("load failures are reported distinctly") {
  TempDir dir("vol_errors");
  const auto base = dir.path() / "v";
  volume_io_save(VoxelVolume::filled({4, 4, 4}, Phase::Void), base);

  SUBCASE("missing files") {
    CHECK_THROWS_AS(volume_io_load(dir.path() / "nope"), FileMissingError);
    std::filesystem::remove(dir.path() / "v.raw");
    CHECK_THROWS_AS(volume_io_load(base), FileMissingError);
  }
  SUBCASE("malformed header") {
    std::ofstream(dir.path() / "v.json") << "{ not json";
    CHECK_THROWS_AS(volume_io_load(base), HeaderError);
    std::ofstream(dir.path() / "v.json")
        << R"({"format":"XXX","dims":[4,4,4],"voxel_size_um":1.0,)"
        << R"("order":"x-fastest","phases":{"0":"void","1":"solid"}})";
    CHECK_THROWS_AS(volume_io_load(base), HeaderError);
  }
  SUBCASE("payload of 63 bytes against dims (4,4,4)") {
    std::ofstream(dir.path() / "v.raw", std::ios::binary)
        << std::string(63, '\0');
    CHECK_THROWS_AS(volume_io_load(base), PayloadSizeError);
  }
  SUBCASE("payload containing byte value 2") {
    std::string payload(64, '\0');
    payload[10] = 2;
    std::ofstream(dir.path() / "v.raw", std::ios::binary) << payload;
    CHECK_THROWS_AS(volume_io_load(base), PhaseValueError);
  }
}

TEST_CASE("header JSON round-trips losslessly") {
  VolumeHeader h;
  h.dims = {5, 6, 7};
  h.voxel_size_um = 3.25;
  CHECK(header_from_json(header_to_json(h)) == h);
}

TEST_CASE("extract_subvolume") {
  auto vol = make_volume({4, 4, 4}, [](int x, int y, int) {
    return std::uint8_t(x == 0 || y == 3 ? 1 : 0);
  });

  SUBCASE("identity window returns the input") {
    auto full = extract_subvolume(vol, {0, 0, 0}, 4);
    CHECK(full.data() == vol.data());
    CHECK(full.voxel_size_um() == vol.voxel_size_um());
  }
  SUBCASE("size-1 window isolates a single voxel") {
    for (auto [x, y, z] : {std::array{1, 3, 2}, std::array{0, 0, 0}}) {
      auto v = extract_subvolume(vol, {x, y, z}, 1);
      CHECK(v.data().size() == 1);
      CHECK(v.data()[0] == vol.at(x, y, z));
    }
  }
  SUBCASE("window past a solid plane is all void") {
    auto plane = make_volume(
        {4, 4, 4}, [](int x, int, int) { return std::uint8_t(x == 0); });
    auto v = extract_subvolume(plane, {1, 0, 0}, 2);
    for (auto b : v.data()) CHECK(b == 0);
  }
  SUBCASE("out-of-bounds windows throw") {
    CHECK_THROWS_AS(extract_subvolume(vol, {1, 0, 0}, 4), std::out_of_range);
    CHECK_THROWS_AS(extract_subvolume(vol, {-1, 0, 0}, 2), std::out_of_range);
    CHECK_THROWS_AS(extract_subvolume(vol, {0, 0, 0}, 5), std::out_of_range);
  }
  SUBCASE("nested extraction composes origins") {
    auto big = testutil::random_volume({8, 8, 8}, 0.4, 99);
    auto outer = extract_subvolume(big, {1, 2, 3}, 5);
    auto inner = extract_subvolume(outer, {2, 1, 0}, 3);
    auto direct = extract_subvolume(big, {3, 3, 3}, 3);
    CHECK(inner.data() == direct.data());
  }
}

TEST_CASE("sample_random_subvolumes") {
  SUBCASE("cubic volume sampled at full size yields copies") {
    auto vol = testutil::random_volume({6, 6, 6}, 0.5, 7);
    auto subs = sample_random_subvolumes(vol, 6, 3, 123);
    REQUIRE(subs.size() == 3);
    for (const auto& s : subs) CHECK(s.data() == vol.data());
  }
  SUBCASE("same seed gives identical origin sequences") {
    auto vol = testutil::random_volume({10, 10, 10}, 0.5, 8);
    CHECK(sample_subvolume_origins(vol, 3, 50, 77) ==
          sample_subvolume_origins(vol, 3, 50, 77));
    CHECK(sample_subvolume_origins(vol, 3, 50, 77) !=
          sample_subvolume_origins(vol, 3, 50, 78));
  }
  SUBCASE("origins are uniform over admissible positions (chi-square)") {
    auto vol = VoxelVolume::filled({10, 10, 10}, Phase::Void);
    const int per_axis = 9;  // 10 - 2 + 1
    const int cells = per_axis * per_axis * per_axis;
    const int n = 10000;
    auto origins = sample_subvolume_origins(vol, 2, n, 2024);
    std::vector<int> hist(cells, 0);
    for (const auto& o : origins)
      ++hist[(o[2] * per_axis + o[1]) * per_axis + o[0]];
    const double expected = static_cast<double>(n) / cells;
    double chi2 = 0.0;
    for (int c : hist) {
      const double d = c - expected;
      chi2 += d * d / expected;
    }
    // 3 sigma around the chi-square mean (dof = cells - 1)
    const double dof = cells - 1;
    const double sigma = std::sqrt(2.0 * dof);
    CHECK(chi2 > dof - 3.0 * sigma);
    CHECK(chi2 < dof + 3.0 * sigma);
  }
  SUBCASE("oversize request throws") {
    auto vol = VoxelVolume::filled({4, 4, 4}, Phase::Void);
    CHECK_THROWS_AS(sample_random_subvolumes(vol, 5, 1, 0), std::out_of_range);
  }
}

TEST_CASE("central_slice") {
  SUBCASE("returns plane z = floor(nz/2)") {
    auto vol = make_volume(
        {3, 3, 5}, [](int, int, int z) { return std::uint8_t(z % 2); });
    auto s = central_slice(vol);  // z = 2 -> phase 0
    for (auto b : s.data) CHECK(b == 0);
    auto vol2 = make_volume(
        {3, 3, 4}, [](int, int, int z) { return std::uint8_t(z % 2); });
    auto s2 = central_slice(vol2);  // even nz: z = 2 -> phase 0
    for (auto b : s2.data) CHECK(b == 0);
  }
  SUBCASE("all-solid volume gives an all-solid slice") {
    auto s = central_slice(VoxelVolume::filled({4, 4, 4}, Phase::Solid));
    for (auto b : s.data) CHECK(b == 1);
  }
  SUBCASE("insert_central is inverted by central_slice") {
    auto vol = VoxelVolume::filled({6, 6, 6}, Phase::Void);
    auto pattern = make_volume(
        {6, 6, 1}, [](int x, int y, int) { return std::uint8_t((x ^ y) & 1); });
    Slice2D slice(6, 6, pattern.data());
    CHECK(central_slice(testutil::insert_central(vol, slice)) == slice);
  }
  SUBCASE("slice porosity equals the plane's own porosity") {
    auto vol = testutil::random_volume({8, 8, 8}, 0.37, 5);
    auto s = central_slice(vol);
    std::int64_t voids = 0;
    for (auto b : s.data) voids += b == 0;
    const double direct = double(voids) / double(s.data.size());
    std::int64_t plane_voids = 0;
    const int z = central_slice_index(8);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) plane_voids += vol.at(x, y, z) == 0;
    CHECK(direct == double(plane_voids) / 64.0);
  }
}

TEST_CASE("binarize") {
  using porogen::ad::Tensor;
  SUBCASE("constant +1 / -1 inputs") {
    auto solid = binarize(Tensor::full({2, 2, 2}, 1.0));
    for (auto b : solid.data()) CHECK(b == 1);
    auto voids = binarize(Tensor::full({2, 2, 2}, -1.0));
    for (auto b : voids.data()) CHECK(b == 0);
  }
  SUBCASE("checkerboard of +/-0.5") {
    std::vector<double> v(27);
    for (int i = 0; i < 27; ++i) v[i] = (i % 2 == 0) ? 0.5 : -0.5;
    auto vol = binarize(Tensor::from({3, 3, 3}, v));
    for (int i = 0; i < 27; ++i)
      CHECK(vol.data()[i] == (i % 2 == 0 ? 1 : 0));
  }
  SUBCASE("non-3D input throws") {
    CHECK_THROWS_AS(binarize(Tensor::full({2, 2}, 1.0)),
                    std::invalid_argument);
  }
  SUBCASE("threshold is strict") {
    auto at_zero = binarize(Tensor::full({1, 1, 1}, 0.0), 0.0);
    CHECK(at_zero.data()[0] == 0);
  }
}
