#pragma once

#include <cstdint>

#include "porogen/volume.hpp"

namespace porogen {

struct FieldSpec {
  int size = 32;                   // cubic edge
  double correlation_length = 0.0; // Gaussian smoothing scale, voxels
  double target_porosity = 0.3;    // fraction in (0,1)
  std::uint64_t seed = 0;
};

// Truncated Gaussian random field: iid standard normals, separable
// Gaussian smoothing at the correlation length, then thresholding at the
// empirical quantile so realized porosity matches the target to within one
// voxel. Voxels below threshold are VOID.
VoxelVolume gaussian_field_volume(const FieldSpec& spec);

// iid voxels, VOID with probability p_void.
VoxelVolume bernoulli_volume(int size, double p_void, std::uint64_t seed);

}  // namespace porogen
