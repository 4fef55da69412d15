#pragma once

#include "porogen/tensor.hpp"

namespace porogen::ad {

// 3D cross-correlation. input [N,C,D,H,W], weight [F,C,k,k,k], bias [F].
// Output extent per axis: (D + 2*padding - k) / stride + 1, which must be
// integral.
Tensor conv3d(const Tensor& input, const Tensor& weight,
              const std::optional<Tensor>& bias, int stride, int padding);

// Adjoint of conv3d with a shared weight: input [N,F,D,H,W],
// weight [F,C,k,k,k] (dim 0 = this op's input channels), bias [C].
// Output extent: (D - 1) * stride + k - 2*padding.
Tensor conv_transpose3d(const Tensor& input, const Tensor& weight,
                        const std::optional<Tensor>& bias, int stride,
                        int padding);

// 2D cross-correlation. input [N,C,H,W], weight [F,C,k,k], bias [F].
Tensor conv2d(const Tensor& input, const Tensor& weight,
              const std::optional<Tensor>& bias, int stride, int padding);

// Affine map. input [N,I], weight [O,I], bias [O].
Tensor dense(const Tensor& input, const Tensor& weight,
             const std::optional<Tensor>& bias);

}  // namespace porogen::ad
