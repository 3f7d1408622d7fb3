#pragma once

#include "weekcast/baselines/labeled.hpp"

#include "json.hpp"

#include <span>
#include <vector>

namespace weekcast::baselines {

struct LogisticConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 500;
};

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
};

/// Full-batch gradient descent on mean log-loss from zero weights. Expects
/// standardized features. Throws NumericError on a non-finite loss.
LogisticModel fit_logistic_regression(const LabeledDataset& data, const LogisticConfig& config = {});

struct ClassPrediction {
    int label = 0;
    double probability = 0.0;
};

/// label = 1 when probability >= threshold.
ClassPrediction predict_logistic(const LogisticModel& model, std::span<const double> features, double threshold = 0.5);

struct LinearModel {
    double intercept = 0.0;
    std::vector<double> slopes;
    /// Set when the normal equations were singular and the ridge term engaged.
    bool rank_deficient = false;
};

/// Least squares with an intercept via the normal equations; on rank
/// deficiency a ridge of 1e-8 is added to the diagonal.
LinearModel fit_linear_regression(const LabeledDataset& data);
double predict_linear(const LinearModel& model, std::span<const double> features);

nlohmann::json to_json(const LogisticModel& model);
nlohmann::json to_json(const LinearModel& model);

} // namespace weekcast::baselines
