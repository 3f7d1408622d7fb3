#include "weekcast/baselines/labeled.hpp"

#include "weekcast/error.hpp"

#include <cmath>

namespace weekcast::baselines {

LabeledDataset build_labeled_dataset(std::span<const FeatureRow> table, TaskMode mode) {
    if (table.size() < 2) throw DataError("labeled dataset needs at least 2 feature rows");
    LabeledDataset out;
    out.mode = mode;
    out.features = Matrix(table.size() - 1, kAllFeatures.size());
    out.targets.reserve(table.size() - 1);
    for (std::size_t t = 0; t + 1 < table.size(); ++t) {
        for (std::size_t c = 0; c < kAllFeatures.size(); ++c) out.features.at(t, c) = table[t].value(kAllFeatures[c]);
        const double next = table[t + 1].percent.close_perc;
        out.targets.push_back(mode == TaskMode::classify ? (next > 0.0 ? 1.0 : 0.0) : next);
    }
    return out;
}

ColumnScaler ColumnScaler::fit(const Matrix& x) {
    ColumnScaler s;
    for (std::size_t c = 0; c < x.cols; ++c) {
        double mean = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) mean += x.at(r, c);
        mean /= static_cast<double>(x.rows);
        double ss = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) ss += (x.at(r, c) - mean) * (x.at(r, c) - mean);
        const double sd = std::sqrt(ss / static_cast<double>(x.rows));
        s.columns_.push_back({mean, sd > 0.0 ? sd : 1.0});
    }
    return s;
}

void ColumnScaler::apply_row(std::span<double> row) const {
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - columns_[c].mean) / columns_[c].sd;
}

Matrix ColumnScaler::apply(const Matrix& x) const {
    if (x.cols != columns_.size()) throw ShapeError("scaler fitted on a different column count");
    Matrix out = x;
    for (std::size_t r = 0; r < out.rows; ++r) apply_row(out.row(r));
    return out;
}

LabeledDataset scaled(const LabeledDataset& data, const ColumnScaler& scaler) {
    LabeledDataset out = data;
    out.features = scaler.apply(data.features);
    return out;
}

} // namespace weekcast::baselines
