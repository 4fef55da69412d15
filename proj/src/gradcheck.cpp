#include "porogen/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace porogen::ad {

namespace {

double relative_error(double a, double b) {
  const double scale = std::max({1e-6, std::abs(a), std::abs(b)});
  return std::abs(a - b) / scale;
}

}  // namespace

double grad_check(const std::function<Tensor(const Tensor&)>& f,
                  const Tensor& input, double step) {
  if (step <= 0.0) throw std::invalid_argument("grad_check: step must be > 0");
  std::vector<double> base(input.values().begin(), input.values().end());

  Tensor x = Tensor::from(input.shape(), base, /*requires_grad=*/true);
  Tensor loss = f(x);
  if (loss.size() != 1)
    throw std::invalid_argument("grad_check: f must return a scalar");
  backward(loss);
  std::vector<double> analytic(x.grad().begin(), x.grad().end());

  double max_rel = 0.0;
  std::vector<double> probe = base;
  for (std::size_t i = 0; i < base.size(); ++i) {
    probe[i] = base[i] + step;
    const double fp = f(Tensor::from(input.shape(), probe)).item();
    probe[i] = base[i] - step;
    const double fm = f(Tensor::from(input.shape(), probe)).item();
    probe[i] = base[i];
    const double fd = (fp - fm) / (2.0 * step);
    max_rel = std::max(max_rel, relative_error(analytic[i], fd));
  }
  return max_rel;
}

double grad_check_coords(const std::function<Tensor()>& loss_fn,
                         Tensor parameter,
                         std::span<const std::int64_t> coords, double step) {
  if (step <= 0.0) throw std::invalid_argument("grad_check: step must be > 0");
  if (!parameter.requires_grad())
    throw std::invalid_argument("grad_check: parameter must require grad");

  parameter.zero_grad();
  Tensor loss = loss_fn();
  if (loss.size() != 1)
    throw std::invalid_argument("grad_check: loss must be a scalar");
  backward(loss);
  std::vector<double> analytic(parameter.grad().begin(),
                               parameter.grad().end());

  double max_rel = 0.0;
  auto w = parameter.values_mut();
  for (std::int64_t c : coords) {
    if (c < 0 || c >= parameter.size())
      throw std::invalid_argument("grad_check: coordinate out of range");
    const double saved = w[c];
    w[c] = saved + step;
    const double fp = loss_fn().item();
    w[c] = saved - step;
    const double fm = loss_fn().item();
    w[c] = saved;
    const double fd = (fp - fm) / (2.0 * step);
    max_rel = std::max(max_rel, relative_error(analytic[c], fd));
  }
  parameter.zero_grad();
  return max_rel;
}

}  // namespace porogen::ad
