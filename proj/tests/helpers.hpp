#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "porogen/rng.hpp"
#include "porogen/volume.hpp"

namespace testutil {

using porogen::Dims3;
using porogen::Phase;
using porogen::Slice2D;
using porogen::VoxelVolume;

inline VoxelVolume make_volume(
    Dims3 dims, const std::function<std::uint8_t(int, int, int)>& f,
    double voxel_size_um = 1.0) {
  std::vector<std::uint8_t> data(static_cast<std::size_t>(dims.count()));
  std::size_t i = 0;
  for (int z = 0; z < dims.nz; ++z)
    for (int y = 0; y < dims.ny; ++y)
      for (int x = 0; x < dims.nx; ++x, ++i) data[i] = f(x, y, z);
  return VoxelVolume(dims, voxel_size_um, std::move(data));
}

inline VoxelVolume random_volume(Dims3 dims, double p_solid,
                                 std::uint64_t seed) {
  porogen::CounterRng rng(seed);
  return make_volume(dims, [&](int, int, int) {
    return std::uint8_t(rng.next_double() < p_solid ? 1 : 0);
  });
}

// Test-only dual of central_slice: writes the slice into plane
// z = floor(nz/2) of a copy of the volume.
inline VoxelVolume insert_central(const VoxelVolume& vol,
                                  const Slice2D& slice) {
  const auto& d = vol.dims();
  std::vector<std::uint8_t> data = vol.data();
  const int z = porogen::central_slice_index(d.nz);
  for (int y = 0; y < d.ny; ++y)
    for (int x = 0; x < d.nx; ++x)
      data[vol.index(x, y, z)] = slice.at(x, y);
  return VoxelVolume(d, vol.voxel_size_um(), std::move(data));
}

// Independent surface oracle: unit faces of selected-phase voxels that
// border the other phase or the domain boundary.
inline std::int64_t brute_force_exposed_faces(const VoxelVolume& vol,
                                              Phase phase) {
  const auto& d = vol.dims();
  const std::uint8_t want = porogen::phase_byte(phase);
  auto selected = [&](int x, int y, int z) {
    if (x < 0 || y < 0 || z < 0 || x >= d.nx || y >= d.ny || z >= d.nz)
      return false;
    return vol.at(x, y, z) == want;
  };
  std::int64_t exposed = 0;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) {
        if (!selected(x, y, z)) continue;
        exposed += !selected(x - 1, y, z);
        exposed += !selected(x + 1, y, z);
        exposed += !selected(x, y - 1, z);
        exposed += !selected(x, y + 1, z);
        exposed += !selected(x, y, z - 1);
        exposed += !selected(x, y, z + 1);
      }
  return exposed;
}

// Scratch directory under the system temp root, cleaned on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("porogen_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
