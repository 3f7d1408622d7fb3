#include "weekcast/baselines/knn.hpp"

#include "weekcast/error.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace weekcast::baselines {

double knn_predict(const LabeledDataset& train, std::span<const double> query, std::size_t k) {
    const std::size_t n = train.size();
    if (n == 0) throw std::invalid_argument("knn: empty training set");
    if (k == 0 || k > n) throw std::invalid_argument("knn: k must lie in [1, training size]");
    if (query.size() != train.features.cols) throw ShapeError("knn: query has the wrong feature count");

    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = train.features.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - query[j]) * (x[j] - query[j]);
        dist[i] = s;
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });

    if (train.mode == TaskMode::regress) {
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += train.targets[idx[i]];
        return sum / static_cast<double>(k);
    }
    std::size_t ones = 0;
    for (std::size_t i = 0; i < k; ++i) ones += static_cast<std::size_t>(train.label(idx[i]));
    return 2 * ones > k ? 1.0 : 0.0;
}

} // namespace weekcast::baselines
