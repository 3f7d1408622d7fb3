#include "weekcast/nn/ops.hpp"

#include "weekcast/error.hpp"
#include "weekcast/nn/kernels.hpp"
#include "weekcast/nn/network.hpp"

namespace weekcast::nn {

namespace k = kernels::serial;

Tensor conv1d_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (input.rank() != 2 || weights.rank() != 3 || bias.rank() != 1 || weights.dim(2) != input.dim(1) ||
        bias.dim(0) != weights.dim(0) || weights.dim(1) == 0 || weights.dim(1) > input.dim(0)) {
        throw ShapeError("conv1d: input " + shape_to_string(input.shape) + ", weights " +
                         shape_to_string(weights.shape) + ", bias " + shape_to_string(bias.shape));
    }
    const kernels::Conv1dDims d{1, input.dim(0), input.dim(1), weights.dim(0), weights.dim(1)};
    Tensor out({d.out_length(), d.filters});
    k::conv1d_forward(d, input.data(), weights.data(), bias.data(), out.data());
    return out;
}

Tensor maxpool1d_forward(const Tensor& input, std::size_t pool) {
    if (input.rank() != 2 || pool == 0) throw ShapeError("maxpool1d: input " + shape_to_string(input.shape));
    const kernels::PoolDims d{1, input.dim(0), input.dim(1), pool};
    Tensor out({d.out_length(), d.channels});
    k::maxpool1d_forward(d, input.data(), out.data());
    return out;
}

Tensor dense_forward(const Tensor& input, const Tensor& weights, const Tensor& bias) {
    if (input.rank() != 1 || weights.rank() != 2 || bias.rank() != 1 || weights.dim(1) != input.dim(0) ||
        bias.dim(0) != weights.dim(0)) {
        throw ShapeError("dense: input " + shape_to_string(input.shape) + ", weights " +
                         shape_to_string(weights.shape) + ", bias " + shape_to_string(bias.shape));
    }
    const kernels::DenseDims d{1, input.dim(0), weights.dim(0)};
    Tensor out({d.units});
    k::dense_forward(d, input.data(), weights.data(), bias.data(), out.data());
    return out;
}

Tensor relu(const Tensor& input) {
    Tensor out(input.shape);
    k::relu_forward(input.data(), out.data());
    return out;
}

Tensor flatten(const Tensor& input) { return Tensor({input.size()}, input.values); }

Tensor concat(std::span<const Tensor> inputs) {
    std::vector<double> values;
    for (const auto& t : inputs) {
        if (t.rank() != 1) throw ShapeError("concat: inputs must be rank 1, got " + shape_to_string(t.shape));
        values.insert(values.end(), t.values.begin(), t.values.end());
    }
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

double mse_loss(const Tensor& pred, const Tensor& target) { return loss_value(LossKind::mse, pred, target); }

} // namespace weekcast::nn
