#pragma once

// Single-sample layer operations over unbatched tensors. Training code uses
// the batched kernels through forward/backprop; these exist for direct use
// and for tests.

#include "weekcast/nn/tensor.hpp"

#include <span>

namespace weekcast::nn {

/// input [length, channels], weights [filters, kernel, channels], bias [filters]
/// -> [length - kernel + 1, filters]. Stride 1, no padding.
Tensor conv1d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

/// input [length, channels] -> [length / pool, channels]; remainder dropped.
Tensor maxpool1d_forward(const Tensor& input, std::size_t pool);

/// input [n], weights [m, n], bias [m] -> [m].
Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias);

Tensor relu(const Tensor& input);
Tensor flatten(const Tensor& input);
/// Rank-1 inputs joined in order.
Tensor concat(std::span<const Tensor> inputs);

double mse_loss(const Tensor& pred, const Tensor& target);

} // namespace weekcast::nn
