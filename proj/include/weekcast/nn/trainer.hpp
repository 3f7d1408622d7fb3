#pragma once

#include "weekcast/nn/adam.hpp"
#include "weekcast/nn/network.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace weekcast::nn {

/// Samples along the leading dimension: one tensor per input head plus targets.
struct Dataset {
    std::vector<Tensor> inputs;
    Tensor targets;

    std::size_t size() const { return targets.rank() == 0 ? 0 : targets.shape[0]; }
    /// Rows picked in the given order.
    Dataset subset(std::span<const std::size_t> rows) const;
};

struct TrainingConfig {
    std::size_t epochs = 20;
    std::size_t batch_size = 4;
    std::uint64_t seed = 0;
    bool shuffle = true;
    LossKind loss = LossKind::mse;
    AdamHyper adam;
    kernels::Backend backend = kernels::Backend::parallel;
};

struct FitResult {
    Params params;
    /// Sample-weighted mean training loss per epoch.
    std::vector<double> loss_trace;
};

/// Mini-batch Adam training. Each epoch shuffles with a generator seeded from
/// (seed, epoch) and keeps the last partial batch. Throws DivergenceError on a
/// non-finite loss or gradient.
FitResult fit(const NetworkSpec& spec, Params params, const Dataset& data, const TrainingConfig& config);

/// Forward pass over batched heads; returns the raw (linear) outputs.
Tensor predict(const NetworkSpec& spec, const Params& params, std::span<const Tensor> heads,
               kernels::Backend backend = kernels::Backend::parallel);

/// Unbatched heads (each exactly the head shape) -> output vector.
Tensor predict_one(const NetworkSpec& spec, const Params& params, std::span<const Tensor> heads);

} // namespace weekcast::nn
