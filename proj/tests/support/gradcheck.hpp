#pragma once

// Finite-difference gradient checking shared by the unit and acceptance suites.

#include "weekcast/nn/network.hpp"
#include "weekcast/random.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace weekcast::testing {

struct RandomNetwork {
    nn::NetworkSpec spec;
    nn::Params params;
    std::vector<nn::Tensor> heads;  // batched
    nn::Tensor targets;
    nn::LossKind loss = nn::LossKind::mse;
};

inline nn::Tensor random_tensor(Rng& rng, nn::Shape shape, double scale = 1.0) {
    nn::Tensor t(std::move(shape));
    for (auto& v : t.values) v = scale * rng.normal();
    return t;
}

// One or two sequence heads (conv, relu, optional pool, flatten), concat when
// there are two, then dense-relu-dense. Stays under 500 parameters.
inline RandomNetwork random_network(std::uint64_t seed, std::size_t batch = 3) {
    Rng rng(seed);
    RandomNetwork net;
    const std::size_t n_heads = 1 + rng.below(2);
    std::vector<nn::NodeId> flats;
    std::vector<nn::Shape> head_shapes;
    for (std::size_t h = 0; h < n_heads; ++h) {
        const std::size_t length = 6 + rng.below(5);
        const std::size_t channels = 1 + rng.below(3);
        auto x = net.spec.input({length, channels});
        head_shapes.push_back({length, channels});
        x = net.spec.relu(net.spec.conv1d(x, 2 + rng.below(3), 2 + rng.below(2)));
        if (rng.below(2) == 0) x = net.spec.maxpool1d(x, 2);
        flats.push_back(net.spec.flatten(x));
    }
    auto x = n_heads == 1 ? flats.front() : net.spec.concat(flats);
    x = net.spec.relu(net.spec.dense(x, 3 + rng.below(3)));
    const std::size_t outputs = 1 + rng.below(3);
    net.spec.dense(x, outputs);
    net.spec.validate();

    net.params = nn::init_params(net.spec, seed);
    // Non-zero biases so the check also covers them meaningfully.
    for (auto& layer : net.params.layers)
        for (auto& b : layer.bias.values) b = 0.1 * rng.normal();
    for (const auto& s : head_shapes) {
        nn::Shape batched{batch};
        batched.insert(batched.end(), s.begin(), s.end());
        net.heads.push_back(random_tensor(rng, batched));
    }
    net.loss = rng.below(2) == 0 ? nn::LossKind::mse : nn::LossKind::logloss;
    net.targets = nn::Tensor({batch, outputs});
    for (auto& t : net.targets.values) {
        t = net.loss == nn::LossKind::logloss ? static_cast<double>(rng.below(2)) : rng.normal();
    }
    return net;
}

// ReLU sign pattern and max-pool argmax positions; a finite difference whose
// two evaluations see different patterns straddles a kink and is not a valid
// derivative estimate.
inline std::vector<std::size_t> activation_pattern(const nn::NetworkSpec& spec, const nn::ForwardTrace& trace) {
    std::vector<std::size_t> pattern;
    for (std::size_t i = 0; i < spec.nodes().size(); ++i) {
        const auto& node = spec.node(i);
        if (node.layer.kind == nn::LayerKind::relu) {
            for (double v : trace.activations[node.inputs[0]].values) pattern.push_back(v > 0.0 ? 1 : 0);
        } else if (node.layer.kind == nn::LayerKind::maxpool1d) {
            const auto& in = trace.activations[node.inputs[0]];
            const auto& in_shape = spec.node(node.inputs[0]).output_shape;
            const std::size_t length = in_shape[0], channels = in_shape[1], pool = node.layer.pool;
            const std::size_t batch = in.shape[0];
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t p = 0; p < length / pool; ++p)
                    for (std::size_t c = 0; c < channels; ++c) {
                        std::size_t best = 0;
                        for (std::size_t k = 1; k < pool; ++k) {
                            const auto at = [&](std::size_t kk) {
                                return in.values[(b * length + p * pool + kk) * channels + c];
                            };
                            if (at(k) > at(best)) best = k;
                        }
                        pattern.push_back(best);
                    }
        }
    }
    return pattern;
}

struct GradCheckResult {
    double max_rel_error = 0.0;
    double max_abs_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped_kinks = 0;
};

// Relative error |a - n| / max(|a|, |n|, floor) over every parameter.
inline GradCheckResult gradient_check(const RandomNetwork& net, double h = 1e-5, double floor = 1e-4) {
    const auto analytic = nn::backprop_gradients(net.spec, net.params, net.heads, net.targets, net.loss,
                                                 nn::kernels::Backend::serial);
    const auto base_pattern =
        activation_pattern(net.spec, nn::forward(net.spec, net.params, net.heads, nn::kernels::Backend::serial));

    GradCheckResult result;
    nn::Params probe = net.params;
    auto probe_tensors = probe.tensors();
    const auto grad_tensors = analytic.gradients.tensors();
    for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
        for (std::size_t i = 0; i < probe_tensors[t]->size(); ++i) {
            double& p = probe_tensors[t]->values[i];
            const double saved = p;
            const auto eval = [&](double value, bool& kink) {
                p = value;
                const auto trace = nn::forward(net.spec, probe, net.heads, nn::kernels::Backend::serial);
                if (activation_pattern(net.spec, trace) != base_pattern) kink = true;
                return nn::loss_value(net.loss, trace.activations.back(), net.targets);
            };
            bool kink = false;
            const double up = eval(saved + h, kink);
            const double down = eval(saved - h, kink);
            p = saved;
            if (kink) {
                ++result.skipped_kinks;
                continue;
            }
            const double numeric = (up - down) / (2.0 * h);
            const double a = grad_tensors[t]->values[i];
            const double abs_err = std::abs(a - numeric);
            const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), floor});
            result.max_rel_error = std::max(result.max_rel_error, rel);
            result.max_abs_error = std::max(result.max_abs_error, abs_err);
            ++result.checked;
        }
    }
    return result;
}

} // namespace weekcast::testing
