#include "weekcast/baselines/ann.hpp"

#include <cmath>
#include <stdexcept>

namespace weekcast::baselines {

nn::NetworkSpec build_ann_baseline(TaskMode, std::size_t inputs) {
    nn::NetworkSpec spec;
    auto x = spec.input({inputs});
    x = spec.relu(spec.dense(x, 16));
    spec.dense(x, 1);
    spec.validate();
    return spec;
}

AnnModel fit_ann(const LabeledDataset& data, const AnnConfig& config) {
    if (data.size() == 0) throw std::invalid_argument("ann: empty dataset");
    AnnModel model;
    model.mode = data.mode;
    model.spec = build_ann_baseline(data.mode, data.features.cols);

    nn::Dataset ds;
    ds.inputs.emplace_back(nn::Shape{data.size(), data.features.cols}, data.features.data);
    ds.targets = nn::Tensor({data.size(), 1}, data.targets);

    nn::TrainingConfig tc;
    tc.epochs = config.epochs;
    tc.batch_size = config.batch_size;
    tc.seed = config.seed;
    tc.adam.learning_rate = config.learning_rate;
    tc.loss = data.mode == TaskMode::classify ? nn::LossKind::logloss : nn::LossKind::mse;
    model.params = nn::fit(model.spec, nn::init_params(model.spec, config.seed), ds, tc).params;
    return model;
}

double ann_output(const AnnModel& model, std::span<const double> features) {
    const nn::Tensor x({features.size()}, std::vector<double>(features.begin(), features.end()));
    const double z = nn::predict_one(model.spec, model.params, std::span<const nn::Tensor>(&x, 1)).values.at(0);
    if (model.mode == TaskMode::regress) return z;
    return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double ann_predict(const AnnModel& model, std::span<const double> features) {
    const double out = ann_output(model, features);
    if (model.mode == TaskMode::regress) return out;
    return out >= 0.5 ? 1.0 : 0.0;
}

} // namespace weekcast::baselines
