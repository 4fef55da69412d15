#include "porogen/correlation.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace porogen {

namespace {

void check_max_r(const VoxelVolume& vol, int max_r) {
  if (max_r < 1)
    throw std::invalid_argument("two_point_correlation: max_r must be >= 1");
  const auto& d = vol.dims();
  const double diag = std::sqrt(static_cast<double>(d.nx) * d.nx +
                                static_cast<double>(d.ny) * d.ny +
                                static_cast<double>(d.nz) * d.nz);
  if (max_r > diag)
    throw std::invalid_argument(
        "two_point_correlation: max_r exceeds the volume diagonal");
}

std::vector<std::uint8_t> phase_mask(const VoxelVolume& vol, Phase phase) {
  const std::uint8_t want = phase_byte(phase);
  std::vector<std::uint8_t> sel(vol.data().size());
  for (std::size_t i = 0; i < sel.size(); ++i)
    sel[i] = vol.data()[i] == want;
  return sel;
}

TpcCurve make_curve(int max_r) {
  TpcCurve c;
  c.radii.resize(max_r + 1);
  c.probabilities.assign(max_r + 1, 0.0);
  c.counts.assign(max_r + 1, 0);
  for (int r = 0; r <= max_r; ++r) c.radii[r] = r;
  return c;
}

void fill_r0(const VoxelVolume& vol, const std::vector<std::uint8_t>& sel,
             TpcCurve& c) {
  std::int64_t hits = 0;
  for (std::uint8_t b : sel) hits += b;
  c.counts[0] = vol.dims().count();
  c.probabilities[0] =
      static_cast<double>(hits) / static_cast<double>(c.counts[0]);
}

}  // namespace

TpcCurve two_point_correlation_exhaustive(const VoxelVolume& vol, Phase phase,
                                          int max_r) {
  check_max_r(vol, max_r);
  const auto& d = vol.dims();
  const auto sel = phase_mask(vol, phase);
  TpcCurve c = make_curve(max_r);
  fill_r0(vol, sel, c);

  const std::int64_t sx = 1;
  const std::int64_t sy = d.nx;
  const std::int64_t sz = static_cast<std::int64_t>(d.nx) * d.ny;

  for (int r = 1; r <= max_r; ++r) {
    std::int64_t hits = 0, total = 0;
    if (r < d.nx) {
      total += static_cast<std::int64_t>(d.nx - r) * d.ny * d.nz;
      for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y) {
          const std::uint8_t* row = sel.data() + sy * y + sz * z;
          for (int x = 0; x + r < d.nx; ++x)
            hits += row[x] & row[x + r * sx];
        }
    }
    if (r < d.ny) {
      total += static_cast<std::int64_t>(d.ny - r) * d.nx * d.nz;
      for (int z = 0; z < d.nz; ++z)
        for (int y = 0; y + r < d.ny; ++y) {
          const std::uint8_t* row = sel.data() + sy * y + sz * z;
          const std::uint8_t* partner = row + sy * r;
          for (int x = 0; x < d.nx; ++x) hits += row[x] & partner[x];
        }
    }
    if (r < d.nz) {
      total += static_cast<std::int64_t>(d.nz - r) * d.nx * d.ny;
      for (int z = 0; z + r < d.nz; ++z)
        for (int y = 0; y < d.ny; ++y) {
          const std::uint8_t* row = sel.data() + sy * y + sz * z;
          const std::uint8_t* partner = row + sz * r;
          for (int x = 0; x < d.nx; ++x) hits += row[x] & partner[x];
        }
    }
    c.counts[r] = total;
    c.probabilities[r] =
        total > 0 ? static_cast<double>(hits) / static_cast<double>(total)
                  : 0.0;
  }
  return c;
}

TpcCurve two_point_correlation_monte_carlo(const VoxelVolume& vol, Phase phase,
                                           int max_r,
                                           std::int64_t pairs_per_radius,
                                           std::uint64_t seed) {
  check_max_r(vol, max_r);
  if (pairs_per_radius < 1)
    throw std::invalid_argument("two_point_correlation: n_pairs must be >= 1");
  const auto& d = vol.dims();
  const auto sel = phase_mask(vol, phase);
  TpcCurve c = make_curve(max_r);
  fill_r0(vol, sel, c);

  for (int r = 1; r <= max_r; ++r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r));
    std::int64_t hits = 0, total = 0;
    for (std::int64_t t = 0; t < pairs_per_radius; ++t) {
      const int x0 = static_cast<int>(rng.next_below(d.nx));
      const int y0 = static_cast<int>(rng.next_below(d.ny));
      const int z0 = static_cast<int>(rng.next_below(d.nz));
      double ux, uy, uz, norm2;
      do {
        ux = rng.next_normal();
        uy = rng.next_normal();
        uz = rng.next_normal();
        norm2 = ux * ux + uy * uy + uz * uz;
      } while (norm2 < 1e-12);
      const double inv = static_cast<double>(r) / std::sqrt(norm2);
      const long x1 = std::lround(x0 + ux * inv);
      const long y1 = std::lround(y0 + uy * inv);
      const long z1 = std::lround(z0 + uz * inv);
      if (x1 < 0 || y1 < 0 || z1 < 0 || x1 >= d.nx || y1 >= d.ny ||
          z1 >= d.nz)
        continue;
      ++total;
      hits += sel[vol.index(x0, y0, z0)] &
              sel[vol.index(static_cast<int>(x1), static_cast<int>(y1),
                            static_cast<int>(z1))];
    }
    c.counts[r] = total;
    c.probabilities[r] =
        total > 0 ? static_cast<double>(hits) / static_cast<double>(total)
                  : 0.0;
  }
  return c;
}

TpcCurve two_point_correlation(const VoxelVolume& vol, Phase phase, int max_r,
                               const TpcEstimator& estimator) {
  if (estimator.kind == TpcEstimator::Kind::Exhaustive)
    return two_point_correlation_exhaustive(vol, phase, max_r);
  return two_point_correlation_monte_carlo(
      vol, phase, max_r, estimator.pairs_per_radius, estimator.seed);
}

std::string tpc_to_csv(const TpcCurve& curve) {
  std::string out = "r,probability,pair_count\n";
  char buf[96];
  for (std::size_t i = 0; i < curve.radii.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld\n", curve.radii[i],
                  curve.probabilities[i],
                  static_cast<long long>(curve.counts[i]));
    out += buf;
  }
  return out;
}

}  // namespace porogen
