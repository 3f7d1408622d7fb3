#pragma once

#include "weekcast/features.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace weekcast::baselines {

enum class TaskMode { classify, regress };

/// Row-major sample matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    std::span<const double> row(std::size_t i) const { return std::span<const double>(data).subspan(i * cols, cols); }
    std::span<double> row(std::size_t i) { return std::span<double>(data).subspan(i * cols, cols); }
    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Features of day t paired with the day t+1 target. Classification labels
/// are 1.0 when close_perc(t+1) > 0 and 0.0 otherwise.
struct LabeledDataset {
    Matrix features;
    std::vector<double> targets;
    TaskMode mode = TaskMode::classify;

    std::size_t size() const { return targets.size(); }
    int label(std::size_t i) const { return targets[i] > 0.5 ? 1 : 0; }
};

/// All nine variables in export order; n rows give n - 1 samples. Throws
/// DataError for fewer than two rows.
LabeledDataset build_labeled_dataset(std::span<const FeatureRow> table, TaskMode mode);

/// Per-column z-scores fitted on training features. Constant columns are
/// centred but not scaled.
class ColumnScaler {
public:
    static ColumnScaler fit(const Matrix& x);
    Matrix apply(const Matrix& x) const;
    void apply_row(std::span<double> row) const;

    const std::vector<ZScore>& columns() const { return columns_; }

private:
    std::vector<ZScore> columns_;
};

LabeledDataset scaled(const LabeledDataset& data, const ColumnScaler& scaler);

} // namespace weekcast::baselines
