#include "weekcast/forecasters.hpp"

#include "weekcast/error.hpp"
#include "weekcast/market_data.hpp"
#include "weekcast/text.hpp"

#include <stdexcept>

namespace weekcast {

ModelKind ModelKind::univariate(std::size_t n_in) {
    if (n_in != 5 && n_in != 10) throw std::invalid_argument("univariate input length must be 5 or 10");
    return {ModelFamily::univariate, n_in};
}

std::string ModelKind::name() const {
    switch (family) {
    case ModelFamily::univariate: return "cnn_uni" + std::to_string(n_in);
    case ModelFamily::multichannel: return "cnn_multichannel";
    case ModelFamily::multihead: return "cnn_multihead";
    }
    return "?";
}

ModelKind ModelKind::from_name(std::string_view name) {
    if (name == "cnn_uni5") return univariate(5);
    if (name == "cnn_uni10") return univariate(10);
    if (name == "cnn_multichannel") return multichannel();
    if (name == "cnn_multihead") return multihead();
    throw std::invalid_argument("unknown CNN model '" + std::string(name) + "'");
}

PercentSeries PercentSeries::from_table(std::span<const FeatureRow> table) {
    return {feature_column(table, Feature::close_perc), feature_column(table, Feature::open_perc),
            feature_column(table, Feature::high_perc), feature_column(table, Feature::low_perc)};
}

namespace {

std::size_t sample_count(std::size_t length, std::size_t n_in) {
    if (n_in == 0) throw std::invalid_argument("input window must be positive");
    if (length < n_in + kHorizon) {
        throw DataError("series of length " + std::to_string(length) + " is too short for a " +
                        std::to_string(n_in) + "-day window and a " + std::to_string(kHorizon) + "-day target");
    }
    return length - n_in - kHorizon + 1;
}

nn::Tensor frame_targets(std::span<const double> close, std::size_t n_in, std::size_t samples) {
    nn::Tensor t({samples, kHorizon});
    for (std::size_t i = 0; i < samples; ++i)
        for (std::size_t j = 0; j < kHorizon; ++j) t[i * kHorizon + j] = close[i + n_in + j];
    return t;
}

std::vector<const std::vector<double>*> channels_of(const PercentSeries& s) {
    if (s.open.size() != s.close.size() || s.high.size() != s.close.size() || s.low.size() != s.close.size()) {
        throw DataError("percent series are not aligned");
    }
    return {&s.close, &s.open, &s.high, &s.low};
}

} // namespace

SupervisedDataset frame_univariate(std::span<const double> close_perc, std::size_t n_in) {
    const std::size_t samples = sample_count(close_perc.size(), n_in);
    SupervisedDataset out;
    nn::Tensor x({samples, n_in, 1});
    for (std::size_t i = 0; i < samples; ++i)
        for (std::size_t t = 0; t < n_in; ++t) x[i * n_in + t] = close_perc[i + t];
    out.inputs.push_back(std::move(x));
    out.targets = frame_targets(close_perc, n_in, samples);
    return out;
}

SupervisedDataset frame_multichannel(const PercentSeries& series, std::size_t n_in) {
    const auto channels = channels_of(series);
    const std::size_t samples = sample_count(series.size(), n_in);
    const std::size_t C = channels.size();
    SupervisedDataset out;
    nn::Tensor x({samples, n_in, C});
    for (std::size_t i = 0; i < samples; ++i)
        for (std::size_t t = 0; t < n_in; ++t)
            for (std::size_t c = 0; c < C; ++c) x[(i * n_in + t) * C + c] = (*channels[c])[i + t];
    out.inputs.push_back(std::move(x));
    out.targets = frame_targets(series.close, n_in, samples);
    return out;
}

SupervisedDataset frame_multihead(const PercentSeries& series, std::size_t n_in) {
    const auto channels = channels_of(series);
    SupervisedDataset out;
    for (const auto* ch : channels) {
        auto head = frame_univariate(*ch, n_in);
        out.inputs.push_back(std::move(head.inputs[0]));
    }
    out.targets = frame_targets(series.close, n_in, sample_count(series.size(), n_in));
    return out;
}

SupervisedDataset frame_for(const ModelKind& kind, std::span<const FeatureRow> table) {
    switch (kind.family) {
    case ModelFamily::univariate: {
        const auto close = feature_column(table, Feature::close_perc);
        return frame_univariate(close, kind.n_in);
    }
    case ModelFamily::multichannel: return frame_multichannel(PercentSeries::from_table(table), kind.n_in);
    case ModelFamily::multihead: return frame_multihead(PercentSeries::from_table(table), kind.n_in);
    }
    throw std::invalid_argument("unknown model family");
}

namespace {

nn::NodeId pool_unless_degenerate(nn::NetworkSpec& spec, nn::NodeId x, std::size_t pool) {
    return spec.node(x).output_shape[0] <= 1 ? x : spec.maxpool1d(x, pool);
}

} // namespace

nn::NetworkSpec build_model_a(std::size_t n_in) {
    nn::NetworkSpec spec;
    auto x = spec.input({n_in, 1});
    x = spec.relu(spec.conv1d(x, 16, 3));
    x = pool_unless_degenerate(spec, x, 2);
    x = spec.flatten(x);
    x = spec.relu(spec.dense(x, 10));
    spec.dense(x, kHorizon);
    spec.validate();
    return spec;
}

nn::NetworkSpec build_model_b(std::size_t n_in) {
    nn::NetworkSpec spec;
    auto x = spec.input({n_in, 4});
    x = spec.relu(spec.conv1d(x, 32, 3));
    x = spec.relu(spec.conv1d(x, 32, 3));
    x = pool_unless_degenerate(spec, x, 2);
    x = spec.relu(spec.conv1d(x, 16, 3));
    x = pool_unless_degenerate(spec, x, 2);
    x = spec.flatten(x);
    x = spec.relu(spec.dense(x, 100));
    spec.dense(x, kHorizon);
    spec.validate();
    return spec;
}

nn::NetworkSpec build_model_c(std::size_t n_in) {
    nn::NetworkSpec spec;
    std::vector<nn::NodeId> flats;
    for (int h = 0; h < 4; ++h) {
        auto x = spec.input({n_in, 1});
        x = spec.relu(spec.conv1d(x, 32, 3));
        x = spec.relu(spec.conv1d(x, 32, 3));
        x = pool_unless_degenerate(spec, x, 2);
        flats.push_back(spec.flatten(x));
    }
    auto x = spec.concat(flats);
    x = spec.relu(spec.dense(x, 200));
    x = spec.relu(spec.dense(x, 100));
    spec.dense(x, kHorizon);
    spec.validate();
    return spec;
}

nn::NetworkSpec build_model(const ModelKind& kind) {
    switch (kind.family) {
    case ModelFamily::univariate: return build_model_a(kind.n_in);
    case ModelFamily::multichannel: return build_model_b(kind.n_in);
    case ModelFamily::multihead: return build_model_c(kind.n_in);
    }
    throw std::invalid_argument("unknown model family");
}

nn::TrainingConfig default_training_config(const ModelKind& kind) {
    nn::TrainingConfig c;
    if (kind.family == ModelFamily::univariate) {
        c.epochs = 20;
        c.batch_size = 4;
    } else {
        c.epochs = 70;
        c.batch_size = 16;
    }
    return c;
}

Forecaster train_forecaster(const ModelKind& kind, std::span<const FeatureRow> train,
                            const nn::TrainingConfig& config) {
    Forecaster f{kind, build_model(kind), {}, {}};
    const auto data = frame_for(kind, train);
    auto result = nn::fit(f.spec, nn::init_params(f.spec, config.seed), data, config);
    f.params = std::move(result.params);
    f.loss_trace = std::move(result.loss_trace);
    return f;
}

std::vector<nn::Tensor> history_window(const ModelKind& kind, std::span<const FeatureRow> history) {
    const std::size_t n = kind.n_in;
    if (history.size() < n) {
        throw DataError("history of " + std::to_string(history.size()) + " rows is shorter than the " +
                        std::to_string(n) + "-day input window");
    }
    const auto window = history.subspan(history.size() - n);
    static constexpr Feature kChannels[] = {Feature::close_perc, Feature::open_perc, Feature::high_perc,
                                            Feature::low_perc};
    std::vector<nn::Tensor> heads;
    switch (kind.family) {
    case ModelFamily::univariate: {
        nn::Tensor x({1, n, 1});
        for (std::size_t t = 0; t < n; ++t) x[t] = window[t].percent.close_perc;
        heads.push_back(std::move(x));
        break;
    }
    case ModelFamily::multichannel: {
        nn::Tensor x({1, n, 4});
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t c = 0; c < 4; ++c) x[t * 4 + c] = window[t].value(kChannels[c]);
        heads.push_back(std::move(x));
        break;
    }
    case ModelFamily::multihead:
        for (Feature f : kChannels) {
            nn::Tensor x({1, n, 1});
            for (std::size_t t = 0; t < n; ++t) x[t] = window[t].value(f);
            heads.push_back(std::move(x));
        }
        break;
    }
    return heads;
}

WalkForwardResult walk_forward_evaluate(const Forecaster& model, std::span<const FeatureRow> train,
                                        std::span<const FeatureRow> test, const WalkForwardOptions& options) {
    const auto weeks = chunk_into_weeks(test).weeks;
    if (weeks.empty()) throw DataError("test table holds no complete week");
    if (train.size() < model.kind.n_in) {
        throw DataError("training history of " + std::to_string(train.size()) + " rows is shorter than n_in = " +
                        std::to_string(model.kind.n_in));
    }

    WalkForwardResult result;
    result.predictions = nn::Tensor({weeks.size(), kHorizon});
    result.actuals = nn::Tensor({weeks.size(), kHorizon});

    std::vector<FeatureRow> history(train.begin(), train.end());
    nn::Params params = model.params;
    for (std::size_t w = 0; w < weeks.size(); ++w) {
        if (options.refit_weekly && w > 0) {
            params = nn::fit(model.spec, std::move(params), frame_for(model.kind, history), options.refit_config).params;
        }
        const auto heads = history_window(model.kind, history);
        const nn::Tensor pred = nn::predict(model.spec, params, heads);
        for (std::size_t d = 0; d < kHorizon; ++d) {
            result.predictions[w * kHorizon + d] = pred[d];
            result.actuals[w * kHorizon + d] = weeks[w].rows[d].percent.close_perc;
        }
        result.history_lengths.push_back(history.size());
        result.week_start.push_back(weeks[w].rows.front().date);
        history.insert(history.end(), weeks[w].rows.begin(), weeks[w].rows.end());
    }
    return result;
}

std::string walk_forward_csv(const WalkForwardResult& result) {
    std::string out(kWalkForwardCsvHeader);
    out += '\n';
    const std::size_t weeks = result.predictions.rank() ? result.predictions.shape[0] : 0;
    for (std::size_t w = 0; w < weeks; ++w)
        for (std::size_t d = 0; d < kHorizon; ++d) {
            out += std::to_string(w) + ',' + std::to_string(d + 1) + ',' +
                   format_double(result.predictions[w * kHorizon + d]) + ',' +
                   format_double(result.actuals[w * kHorizon + d]) + '\n';
        }
    return out;
}

} // namespace weekcast
