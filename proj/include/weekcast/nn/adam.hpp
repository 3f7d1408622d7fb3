#pragma once

#include "weekcast/nn/network.hpp"

#include <cstdint>

namespace weekcast::nn {

struct AdamHyper {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    AdamHyper hyper;
    Params first_moment;
    Params second_moment;
    std::uint64_t step = 0;

    static AdamState fresh(const Params& params, AdamHyper hyper = {});
};

/// One bias-corrected Adam step in place; increments state.step. Throws
/// NumericError on non-finite gradients and ShapeError on mismatched shapes.
void adam_update(Params& params, const Params& gradients, AdamState& state);

} // namespace weekcast::nn
