#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "porogen/rng.hpp"
#include "porogen/tensor.hpp"

namespace porogen {

enum class Phase : std::uint8_t { Void = 0, Solid = 1 };

inline std::uint8_t phase_byte(Phase p) { return static_cast<std::uint8_t>(p); }

struct Dims3 {
  int nx = 0, ny = 0, nz = 0;

  friend bool operator==(const Dims3&, const Dims3&) = default;
  std::int64_t count() const {
    return static_cast<std::int64_t>(nx) * ny * nz;
  }
  int min_extent() const { return std::min(nx, std::min(ny, nz)); }
};

// Binary phase grid, x-fastest storage, immutable after construction.
// voxel_size_um is carried metadata only; all analysis is in voxel units.
class VoxelVolume {
 public:
  VoxelVolume(Dims3 dims, double voxel_size_um, std::vector<std::uint8_t> data);

  static VoxelVolume filled(Dims3 dims, Phase phase,
                            double voxel_size_um = 1.0);

  const Dims3& dims() const { return dims_; }
  double voxel_size_um() const { return voxel_size_um_; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_.nx) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(dims_.ny) * z);
  }
  std::uint8_t at(int x, int y, int z) const { return data_[index(x, y, z)]; }
  Phase phase_at(int x, int y, int z) const {
    return static_cast<Phase>(at(x, y, z));
  }

 private:
  Dims3 dims_;
  double voxel_size_um_ = 1.0;
  std::vector<std::uint8_t> data_;
};

struct Slice2D {
  Slice2D(int nx, int ny, std::vector<std::uint8_t> data);

  int nx = 0, ny = 0;
  std::vector<std::uint8_t> data;  // x-fastest

  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(x) +
                static_cast<std::size_t>(nx) * y];
  }
  friend bool operator==(const Slice2D&, const Slice2D&) = default;
};

struct VolumeHeader {
  Dims3 dims;
  double voxel_size_um = 1.0;
  std::string phase_encoding = "0=void,1=solid";
  std::string format_version = "PGV1";

  friend bool operator==(const VolumeHeader&, const VolumeHeader&) = default;
};

std::string header_to_json(const VolumeHeader& h);
VolumeHeader header_from_json(const std::string& text);

// File I/O errors, one type per failure class.
struct VolumeIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FileMissingError : VolumeIoError {
  using VolumeIoError::VolumeIoError;
};
struct HeaderError : VolumeIoError {
  using VolumeIoError::VolumeIoError;
};
struct PayloadSizeError : VolumeIoError {
  using VolumeIoError::VolumeIoError;
};
struct PhaseValueError : VolumeIoError {
  using VolumeIoError::VolumeIoError;
};

// PGV1 on-disk format: "<base>.json" header sidecar plus "<base>.raw"
// payload of exactly nx*ny*nz phase bytes. A trailing .json/.raw on the
// given path is stripped.
void volume_io_save(const VoxelVolume& vol, const std::filesystem::path& path);
VoxelVolume volume_io_load(const std::filesystem::path& path);

VoxelVolume extract_subvolume(const VoxelVolume& vol,
                              std::array<int, 3> origin, int size);

// Uniform draw over admissible cube origins; consumes three rng values
// (x, y, z order).
std::array<int, 3> draw_subvolume_origin(const VoxelVolume& vol, int size,
                                         CounterRng& rng);
std::vector<std::array<int, 3>> sample_subvolume_origins(
    const VoxelVolume& vol, int size, int count, std::uint64_t seed);
std::vector<VoxelVolume> sample_random_subvolumes(const VoxelVolume& vol,
                                                  int size, int count,
                                                  std::uint64_t seed);

// The slice mask: plane z = floor(nz / 2).
Slice2D central_slice(const VoxelVolume& vol);
int central_slice_index(int nz);

// Thresholds a [D,H,W] tensor into phases: SOLID where value > threshold.
VoxelVolume binarize(const ad::Tensor& raw, double threshold = 0.0,
                     double voxel_size_um = 1.0);

}  // namespace porogen
