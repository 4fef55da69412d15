#pragma once

#include <optional>
#include <string>
#include <vector>

#include "porogen/volume.hpp"

namespace porogen {

// Distinct cells of the cubical complex spanned by the selected phase:
// vertices, edges, faces, voxels. Cells shared between voxels count once.
struct CellCounts {
  std::int64_t n0 = 0, n1 = 0, n2 = 0, n3 = 0;

  friend bool operator==(const CellCounts&, const CellCounts&) = default;
};

// The four Minkowski functionals in voxel-derived units plus porosity.
// All of V, S, chi are integer-valued; B may be half-integral.
struct MinkowskiReport {
  double V = 0.0;         // n3
  double S = 0.0;         // -6*n3 + 2*n2
  double B = 0.0;         // 3*n3/2 - n2 + n1/2
  double chi = 0.0;       // -n3 + n2 - n1 + n0
  double porosity = 0.0;  // void fraction, filled by analyze_volume

  friend bool operator==(const MinkowskiReport&,
                         const MinkowskiReport&) = default;
};
using MorphologyReport = MinkowskiReport;

struct RevEntry {
  int size = 0;
  std::vector<double> porosities;
};

struct RevCurve {
  std::vector<RevEntry> entries;  // sizes strictly decreasing
};

double phase_fraction(const VoxelVolume& vol, Phase phase);
double porosity(const VoxelVolume& vol);

CellCounts count_cells(const VoxelVolume& vol, Phase phase);

// Functional fields only; porosity is left at zero.
MinkowskiReport minkowski(const CellCounts& counts);

// Full per-sample report: porosity (void fraction) plus the functionals of
// the selected phase.
MorphologyReport analyze_volume(const VoxelVolume& vol,
                                Phase phase = Phase::Solid);

// Porosity of random subvolumes over a size ladder start_size,
// start_size - step, ... >= min_size, samples_per_size draws each.
RevCurve rev_curve(const VoxelVolume& vol, int start_size, int step,
                   int min_size, int samples_per_size, std::uint64_t seed);

// Smallest ladder size whose porosity spread (IQR / median) stays within
// tolerance together with every larger size; nullopt when even the largest
// size fails ("REV not reached").
std::optional<int> determine_rev(const RevCurve& curve, double tolerance);

std::string report_to_json(const MorphologyReport& r);
std::string report_to_csv(const MorphologyReport& r);
std::string rev_curve_to_json(const RevCurve& c);
std::string rev_curve_to_csv(const RevCurve& c);

}  // namespace porogen
