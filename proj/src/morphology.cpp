#include "porogen/morphology.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "porogen/stats.hpp"

namespace porogen {

double phase_fraction(const VoxelVolume& vol, Phase phase) {
  const std::uint8_t want = phase_byte(phase);
  std::int64_t hits = 0;
  for (std::uint8_t b : vol.data()) hits += (b == want);
  return static_cast<double>(hits) / static_cast<double>(vol.dims().count());
}

double porosity(const VoxelVolume& vol) {
  return phase_fraction(vol, Phase::Void);
}

CellCounts count_cells(const VoxelVolume& vol, Phase phase) {
  const auto& d = vol.dims();
  // Cells are keyed by doubled midpoint coordinates: a voxel at (x,y,z)
  // owns the 27 lattice sites {2x..2x+2} x {2y..2y+2} x {2z..2z+2}; the
  // number of odd coordinates of a site tells its cell dimension.
  const int mx = 2 * d.nx + 1, my = 2 * d.ny + 1, mz = 2 * d.nz + 1;
  std::vector<std::uint8_t> mark(static_cast<std::size_t>(mx) * my * mz, 0);
  const std::uint8_t want = phase_byte(phase);
  const std::uint8_t* data = vol.data().data();

  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y) {
      const std::uint8_t* row = data + vol.index(0, y, z);
      for (int x = 0; x < d.nx; ++x) {
        if (row[x] != want) continue;
        for (int dz = 0; dz < 3; ++dz)
          for (int dy = 0; dy < 3; ++dy) {
            std::uint8_t* m =
                mark.data() +
                (static_cast<std::size_t>(2 * z + dz) * my + (2 * y + dy)) *
                    mx +
                2 * x;
            m[0] = 1;
            m[1] = 1;
            m[2] = 1;
          }
      }
    }

  std::int64_t by_dim[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  for (int z = 0; z < mz; ++z)
    for (int y = 0; y < my; ++y) {
      const int parity_yz = (y & 1) + (z & 1);
      for (int x = 0; x < mx; ++x, ++i)
        if (mark[i]) ++by_dim[parity_yz + (x & 1)];
    }
  return {by_dim[0], by_dim[1], by_dim[2], by_dim[3]};
}

MinkowskiReport minkowski(const CellCounts& c) {
  MinkowskiReport r;
  r.V = static_cast<double>(c.n3);
  r.S = static_cast<double>(-6 * c.n3 + 2 * c.n2);
  r.B = 1.5 * static_cast<double>(c.n3) - static_cast<double>(c.n2) +
        0.5 * static_cast<double>(c.n1);
  r.chi = static_cast<double>(-c.n3 + c.n2 - c.n1 + c.n0);
  return r;
}

MorphologyReport analyze_volume(const VoxelVolume& vol, Phase phase) {
  MorphologyReport r = minkowski(count_cells(vol, phase));
  r.porosity = porosity(vol);
  return r;
}

namespace {

double porosity_in_window(const VoxelVolume& vol, std::array<int, 3> origin,
                          int size) {
  std::int64_t voids = 0;
  const std::uint8_t* data = vol.data().data();
  for (int z = 0; z < size; ++z)
    for (int y = 0; y < size; ++y) {
      const std::uint8_t* row =
          data + vol.index(origin[0], origin[1] + y, origin[2] + z);
      for (int x = 0; x < size; ++x) voids += (row[x] == 0);
    }
  return static_cast<double>(voids) /
         (static_cast<double>(size) * size * size);
}

// IQR / median of a sample set; 0/0 counts as zero spread.
double porosity_spread(const std::vector<double>& values) {
  const BoxPlotStats b = box_plot(values);
  const double iqr = b.q3 - b.q1;
  if (b.median == 0.0)
    return iqr == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return iqr / b.median;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RevCurve rev_curve(const VoxelVolume& vol, int start_size, int step,
                   int min_size, int samples_per_size, std::uint64_t seed) {
  if (min_size < 2) throw std::invalid_argument("rev_curve: min_size >= 2");
  if (step < 1) throw std::invalid_argument("rev_curve: step >= 1");
  if (samples_per_size < 1)
    throw std::invalid_argument("rev_curve: samples_per_size >= 1");
  if (start_size < min_size)
    throw std::invalid_argument("rev_curve: start_size below min_size");
  if (start_size > vol.dims().min_extent())
    throw std::invalid_argument("rev_curve: start_size exceeds volume");

  RevCurve curve;
  std::uint64_t stream = 0;
  for (int size = start_size; size >= min_size; size -= step, ++stream) {
    CounterRng rng(seed, stream);
    RevEntry entry;
    entry.size = size;
    entry.porosities.reserve(samples_per_size);
    for (int i = 0; i < samples_per_size; ++i) {
      const auto origin = draw_subvolume_origin(vol, size, rng);
      entry.porosities.push_back(porosity_in_window(vol, origin, size));
    }
    curve.entries.push_back(std::move(entry));
  }
  return curve;
}

std::optional<int> determine_rev(const RevCurve& curve, double tolerance) {
  if (curve.entries.empty())
    throw std::invalid_argument("determine_rev: empty curve");
  if (!(tolerance > 0.0))
    throw std::invalid_argument("determine_rev: tolerance must be > 0");
  std::optional<int> rev;
  for (const auto& entry : curve.entries) {  // largest size first
    if (porosity_spread(entry.porosities) <= tolerance)
      rev = entry.size;
    else
      break;
  }
  return rev;
}

std::string report_to_json(const MorphologyReport& r) {
  nlohmann::json j;
  j["porosity"] = r.porosity;
  j["V"] = r.V;
  j["S"] = r.S;
  j["B"] = r.B;
  j["chi"] = r.chi;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const MorphologyReport& r) {
  std::string out = "porosity,V,S,B,chi\n";
  out += format_double(r.porosity) + "," + format_double(r.V) + "," +
         format_double(r.S) + "," + format_double(r.B) + "," +
         format_double(r.chi) + "\n";
  return out;
}

std::string rev_curve_to_json(const RevCurve& c) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : c.entries)
    j.push_back({{"size", e.size}, {"porosities", e.porosities}});
  return nlohmann::json{{"entries", j}}.dump(2) + "\n";
}

std::string rev_curve_to_csv(const RevCurve& c) {
  std::string out = "size,sample,porosity\n";
  for (const auto& e : c.entries)
    for (std::size_t i = 0; i < e.porosities.size(); ++i)
      out += std::to_string(e.size) + "," + std::to_string(i) + "," +
             format_double(e.porosities[i]) + "\n";
  return out;
}

}  // namespace porogen
