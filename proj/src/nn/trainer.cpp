#include "weekcast/nn/trainer.hpp"

#include "weekcast/error.hpp"
#include "weekcast/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace weekcast::nn {

namespace {

Tensor gather_rows(const Tensor& t, std::span<const std::size_t> rows) {
    Shape shape = t.shape;
    shape[0] = rows.size();
    Tensor out(shape);
    const std::size_t stride = t.size() / t.shape[0];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = t.row(rows[i]);
        std::copy(src.begin(), src.end(), out.values.begin() + static_cast<std::ptrdiff_t>(i * stride));
    }
    return out;
}

} // namespace

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    for (const auto& in : inputs) out.inputs.push_back(gather_rows(in, rows));
    out.targets = gather_rows(targets, rows);
    return out;
}

FitResult fit(const NetworkSpec& spec, Params params, const Dataset& data, const TrainingConfig& config) {
    spec.validate();
    check_params(spec, params);
    if (config.batch_size == 0) throw std::invalid_argument("batch_size must be at least 1");
    FitResult result;
    if (config.epochs == 0) {
        result.params = std::move(params);
        return result;
    }
    const std::size_t n = data.size();
    if (n == 0) throw std::invalid_argument("cannot fit on an empty dataset");
    for (const auto& in : data.inputs) {
        if (in.rank() == 0 || in.shape[0] != n) throw ShapeError("dataset heads and targets disagree on sample count");
    }

    AdamState adam = AdamState::fresh(params, config.adam);
    std::vector<std::size_t> order(n);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (config.shuffle) {
            Rng rng(mix_seed(config.seed, epoch));
            rng.shuffle(std::span<std::size_t>(order));
        }
        double weighted_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
            const std::size_t end = std::min(n, start + config.batch_size);
            const Dataset batch = data.subset(std::span<const std::size_t>(order).subspan(start, end - start));
            GradientResult g;
            try {
                g = backprop_gradients(spec, params, batch.inputs, batch.targets, config.loss, config.backend);
                adam_update(params, g.gradients, adam);
            } catch (const NumericError& e) {
                throw DivergenceError(e.what(), epoch, batch_index);
            }
            weighted_loss += g.loss * static_cast<double>(end - start);
        }
        result.loss_trace.push_back(weighted_loss / static_cast<double>(n));
    }
    result.params = std::move(params);
    return result;
}

Tensor predict(const NetworkSpec& spec, const Params& params, std::span<const Tensor> heads,
               kernels::Backend backend) {
    auto trace = forward(spec, params, heads, backend);
    return std::move(trace.activations[spec.output()]);
}

Tensor predict_one(const NetworkSpec& spec, const Params& params, std::span<const Tensor> heads) {
    std::vector<Tensor> batched;
    for (const auto& h : heads) {
        Shape s{1};
        s.insert(s.end(), h.shape.begin(), h.shape.end());
        batched.emplace_back(std::move(s), h.values);
    }
    Tensor out = predict(spec, params, batched);
    out.shape.erase(out.shape.begin());
    return out;
}

} // namespace weekcast::nn
