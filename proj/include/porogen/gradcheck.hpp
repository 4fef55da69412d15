#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "porogen/tensor.hpp"

namespace porogen::ad {

// Compares reverse-mode gradients of a scalar-valued map against central
// finite differences (f(x+h) - f(x-h)) / 2h, coordinate by coordinate.
// Returns the maximum relative error; f must be a pure function of its
// argument.
double grad_check(const std::function<Tensor(const Tensor&)>& f,
                  const Tensor& input, double step = 1e-5);

// Same comparison for selected coordinates of an in-graph parameter:
// loss_fn rebuilds the loss from current parameter values on every call.
double grad_check_coords(const std::function<Tensor()>& loss_fn,
                         Tensor parameter,
                         std::span<const std::int64_t> coords,
                         double step = 1e-5);

}  // namespace porogen::ad
