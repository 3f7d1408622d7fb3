#pragma once

#include "weekcast/features.hpp"
#include "weekcast/nn/network.hpp"
#include "weekcast/nn/trainer.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace weekcast {

/// Forecast horizon: one standard week.
inline constexpr std::size_t kHorizon = 5;

enum class ModelFamily { univariate, multichannel, multihead };

struct ModelKind {
    ModelFamily family = ModelFamily::univariate;
    std::size_t n_in = 5;

    /// n_in must be 5 or 10.
    static ModelKind univariate(std::size_t n_in);
    static ModelKind multichannel() { return {ModelFamily::multichannel, 10}; }
    static ModelKind multihead() { return {ModelFamily::multihead, 10}; }

    /// cnn_uni5, cnn_uni10, cnn_multichannel, cnn_multihead
    std::string name() const;
    static ModelKind from_name(std::string_view name);

    bool operator==(const ModelKind&) const = default;
};

/// One tensor per head [samples, n_in, channels]; targets [samples, 5].
using SupervisedDataset = nn::Dataset;

/// The four series the multivariate models read, channel order fixed.
struct PercentSeries {
    std::vector<double> close;
    std::vector<double> open;
    std::vector<double> high;
    std::vector<double> low;

    static PercentSeries from_table(std::span<const FeatureRow> table);
    std::size_t size() const { return close.size(); }
};

/// Stride-1 windows: sample i reads values[i, i+n_in) and targets the next five.
SupervisedDataset frame_univariate(std::span<const double> close_perc, std::size_t n_in);
/// Single head [samples, n_in, 4], channels (close, open, high, low).
SupervisedDataset frame_multichannel(const PercentSeries& series, std::size_t n_in = 10);
/// Four single-channel heads in (close, open, high, low) order.
SupervisedDataset frame_multihead(const PercentSeries& series, std::size_t n_in = 10);
SupervisedDataset frame_for(const ModelKind& kind, std::span<const FeatureRow> table);

/// conv1d(16,3) relu maxpool(2) flatten dense(10) relu dense(5)
nn::NetworkSpec build_model_a(std::size_t n_in);
/// conv1d(32,3) relu conv1d(32,3) relu maxpool(2) conv1d(16,3) relu maxpool(2)
/// flatten dense(100) relu dense(5); a pool over a length <= 1 map is skipped.
nn::NetworkSpec build_model_b(std::size_t n_in = 10);
/// Per head: conv1d(32,3) relu conv1d(32,3) relu maxpool(2) flatten; then
/// concat dense(200) relu dense(100) relu dense(5).
nn::NetworkSpec build_model_c(std::size_t n_in = 10);
nn::NetworkSpec build_model(const ModelKind& kind);

/// Univariate: 20 epochs, batch 4. Multichannel and multihead: 70 epochs, batch 16.
nn::TrainingConfig default_training_config(const ModelKind& kind);

struct Forecaster {
    ModelKind kind;
    nn::NetworkSpec spec;
    nn::Params params;
    std::vector<double> loss_trace;
};

/// Initializes from config.seed and fits on the framed training table.
Forecaster train_forecaster(const ModelKind& kind, std::span<const FeatureRow> train,
                            const nn::TrainingConfig& config);

/// Batched (size 1) model inputs read from the last n_in rows of history.
std::vector<nn::Tensor> history_window(const ModelKind& kind, std::span<const FeatureRow> history);

struct WalkForwardOptions {
    /// Refit on the grown history before every week after the first.
    bool refit_weekly = false;
    nn::TrainingConfig refit_config;
};

struct WalkForwardResult {
    nn::Tensor predictions;  // [weeks, 5]
    nn::Tensor actuals;      // [weeks, 5]
    std::vector<std::size_t> history_lengths;  // rows of history used for each week
    std::vector<Date> week_start;
};

/// History starts as the training rows. Each test week is predicted from the
/// last n_in rows of history, then its actual rows are appended.
WalkForwardResult walk_forward_evaluate(const Forecaster& model, std::span<const FeatureRow> train,
                                        std::span<const FeatureRow> test, const WalkForwardOptions& options = {});

inline constexpr std::string_view kWalkForwardCsvHeader = "week_index,day_of_week,predicted,actual";
std::string walk_forward_csv(const WalkForwardResult& result);

} // namespace weekcast
