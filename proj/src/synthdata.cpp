#include "porogen/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace porogen {

namespace {

// One smoothing pass along a single axis with boundary renormalisation.
void smooth_axis(std::vector<double>& field, int n, int stride_axis,
                 int n_other1, int stride1, int n_other2, int stride2,
                 const std::vector<double>& kernel) {
  const int radius = static_cast<int>(kernel.size() / 2);
  std::vector<double> line(n);
  for (int a = 0; a < n_other1; ++a)
    for (int b = 0; b < n_other2; ++b) {
      double* base = field.data() + static_cast<std::size_t>(a) * stride1 +
                     static_cast<std::size_t>(b) * stride2;
      for (int i = 0; i < n; ++i)
        line[i] = base[static_cast<std::size_t>(i) * stride_axis];
      for (int i = 0; i < n; ++i) {
        double acc = 0.0, wsum = 0.0;
        const int lo = std::max(0, i - radius);
        const int hi = std::min(n - 1, i + radius);
        for (int j = lo; j <= hi; ++j) {
          const double w = kernel[j - i + radius];
          acc += w * line[j];
          wsum += w;
        }
        base[static_cast<std::size_t>(i) * stride_axis] = acc / wsum;
      }
    }
}

}  // namespace

VoxelVolume gaussian_field_volume(const FieldSpec& spec) {
  if (spec.size < 1)
    throw std::invalid_argument("gaussian_field_volume: size must be >= 1");
  if (!(spec.target_porosity > 0.0) || !(spec.target_porosity < 1.0))
    throw std::invalid_argument(
        "gaussian_field_volume: target_porosity must be in (0,1)");
  if (spec.correlation_length < 0.0)
    throw std::invalid_argument(
        "gaussian_field_volume: correlation_length must be >= 0");

  const int n = spec.size;
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  std::vector<double> field(total);
  CounterRng rng(spec.seed);
  for (auto& v : field) v = rng.next_normal();

  if (spec.correlation_length > 0.0) {
    const double sigma = spec.correlation_length;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i)
      kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    const int sx = 1, sy = n, sz = n * n;
    smooth_axis(field, n, sx, n, sy, n, sz, kernel);
    smooth_axis(field, n, sy, n, sx, n, sz, kernel);
    smooth_axis(field, n, sz, n, sx, n, sy, kernel);
  }

  // Exact-count thresholding: the k smallest field values become VOID,
  // ties broken by index.
  const std::int64_t k =
      std::llround(spec.target_porosity * static_cast<double>(total));
  std::vector<std::uint8_t> data(total, phase_byte(Phase::Solid));
  if (k >= static_cast<std::int64_t>(total)) {
    std::fill(data.begin(), data.end(), phase_byte(Phase::Void));
  } else if (k > 0) {
    std::vector<std::uint32_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    std::nth_element(order.begin(), order.begin() + k, order.end(),
                     [&](std::uint32_t a, std::uint32_t b) {
                       return field[a] < field[b] ||
                              (field[a] == field[b] && a < b);
                     });
    for (std::int64_t i = 0; i < k; ++i)
      data[order[i]] = phase_byte(Phase::Void);
  }
  return VoxelVolume({n, n, n}, 1.0, std::move(data));
}

VoxelVolume bernoulli_volume(int size, double p_void, std::uint64_t seed) {
  if (size < 1)
    throw std::invalid_argument("bernoulli_volume: size must be >= 1");
  if (p_void < 0.0 || p_void > 1.0)
    throw std::invalid_argument("bernoulli_volume: p_void must be in [0,1]");
  const std::size_t total = static_cast<std::size_t>(size) * size * size;
  std::vector<std::uint8_t> data(total);
  CounterRng rng(seed);
  for (auto& b : data)
    b = rng.next_double() < p_void ? phase_byte(Phase::Void)
                                   : phase_byte(Phase::Solid);
  return VoxelVolume({size, size, size}, 1.0, std::move(data));
}

}  // namespace porogen
