#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "porogen/volume.hpp"

namespace porogen {

// Two-point probability S2(r): bins are 1 voxel wide, centred on integer
// radii 0..max_r. counts holds the in-volume pair total per bin
// (probability is 0 for bins no pair reached).
struct TpcCurve {
  std::vector<double> radii;
  std::vector<double> probabilities;
  std::vector<std::int64_t> counts;
};

struct TpcEstimator {
  enum class Kind { Exhaustive, MonteCarlo };
  Kind kind = Kind::Exhaustive;
  std::int64_t pairs_per_radius = 10000;  // Monte Carlo only
  std::uint64_t seed = 0;                 // Monte Carlo only

  static TpcEstimator exhaustive() { return {Kind::Exhaustive, 0, 0}; }
  static TpcEstimator monte_carlo(std::int64_t pairs, std::uint64_t seed) {
    return {Kind::MonteCarlo, pairs, seed};
  }
};

// Reference estimator: every in-volume pair along the three axis
// directions, orientation-averaged. No periodic wrap; pairs leaving the
// volume are excluded.
TpcCurve two_point_correlation_exhaustive(const VoxelVolume& vol, Phase phase,
                                          int max_r);

// Production estimator: per radius, pairs_per_radius draws of a uniform
// base voxel and an isotropic direction; the partner voxel is the nearest
// lattice point at distance r. Deterministic per seed.
TpcCurve two_point_correlation_monte_carlo(const VoxelVolume& vol, Phase phase,
                                           int max_r,
                                           std::int64_t pairs_per_radius,
                                           std::uint64_t seed);

TpcCurve two_point_correlation(const VoxelVolume& vol, Phase phase, int max_r,
                               const TpcEstimator& estimator);

std::string tpc_to_csv(const TpcCurve& curve);

}  // namespace porogen
