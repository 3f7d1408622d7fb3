#pragma once

#include "weekcast/baselines/labeled.hpp"
#include "weekcast/nn/network.hpp"
#include "weekcast/nn/trainer.hpp"

#include <span>

namespace weekcast::baselines {

/// dense(16) relu dense(1) over `inputs` features.
nn::NetworkSpec build_ann_baseline(TaskMode mode, std::size_t inputs = 9);

struct AnnModel {
    TaskMode mode = TaskMode::classify;
    nn::NetworkSpec spec;
    nn::Params params;
};

struct AnnConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    std::uint64_t seed = 0;
};

/// Log-loss for classification, MSE for regression.
AnnModel fit_ann(const LabeledDataset& data, const AnnConfig& config = {});

/// Raw output for regression; sigmoid probability for classification.
double ann_output(const AnnModel& model, std::span<const double> features);
/// Class (threshold 0.5) or regression value.
double ann_predict(const AnnModel& model, std::span<const double> features);

} // namespace weekcast::baselines
