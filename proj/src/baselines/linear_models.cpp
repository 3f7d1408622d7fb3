#include "weekcast/baselines/linear_models.hpp"

#include "weekcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weekcast::baselines {

namespace {

double sigmoid(double z) {
    return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double score(const LogisticModel& m, std::span<const double> x) {
    double z = m.bias;
    for (std::size_t j = 0; j < x.size(); ++j) z += m.weights[j] * x[j];
    return z;
}

} // namespace

LogisticModel fit_logistic_regression(const LabeledDataset& data, const LogisticConfig& config) {
    if (data.size() == 0) throw std::invalid_argument("logistic regression on an empty dataset");
    const std::size_t n = data.size();
    const std::size_t d = data.features.cols;
    LogisticModel m{std::vector<double>(d, 0.0), 0.0};
    std::vector<double> grad(d);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto x = data.features.row(i);
            const double z = score(m, x);
            const double y = data.targets[i];
            loss += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - y * z;
            const double r = sigmoid(z) - y;
            for (std::size_t j = 0; j < d; ++j) grad[j] += r * x[j];
            grad_b += r;
        }
        if (!std::isfinite(loss)) throw NumericError("logistic regression: non-finite loss at epoch " + std::to_string(epoch));
        const double step = config.learning_rate / static_cast<double>(n);
        for (std::size_t j = 0; j < d; ++j) m.weights[j] -= step * grad[j];
        m.bias -= step * grad_b;
    }
    return m;
}

ClassPrediction predict_logistic(const LogisticModel& model, std::span<const double> features, double threshold) {
    if (features.size() != model.weights.size()) throw ShapeError("logistic: feature count mismatch");
    const double p = sigmoid(score(model, features));
    return {p >= threshold ? 1 : 0, p};
}

namespace {

/// Cholesky factorisation in place; false if a pivot is not clearly positive.
bool cholesky(std::vector<double>& a, std::size_t n) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a[i * n + i]));
    const double tol = 1e-12 * std::max(max_diag, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
        if (!(diag > tol)) return false;
        a[j * n + j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            a[i * n + j] = s / a[j * n + j];
        }
    }
    return true;
}

std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t n, std::vector<double> b) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= l[i * n + k] * b[k];
        b[i] /= l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) b[i] -= l[k * n + i] * b[k];
        b[i] /= l[i * n + i];
    }
    return b;
}

} // namespace

LinearModel fit_linear_regression(const LabeledDataset& data) {
    if (data.size() == 0) throw std::invalid_argument("linear regression on an empty dataset");
    const std::size_t d = data.features.cols + 1;  // intercept first
    std::vector<double> xtx(d * d, 0.0);
    std::vector<double> xty(d, 0.0);
    std::vector<double> row(d);
    for (std::size_t i = 0; i < data.size(); ++i) {
        row[0] = 1.0;
        const auto x = data.features.row(i);
        std::copy(x.begin(), x.end(), row.begin() + 1);
        for (std::size_t a = 0; a < d; ++a) {
            xty[a] += row[a] * data.targets[i];
            for (std::size_t b = 0; b < d; ++b) xtx[a * d + b] += row[a] * row[b];
        }
    }
    LinearModel m;
    auto factor = xtx;
    if (!cholesky(factor, d)) {
        m.rank_deficient = true;
        factor = xtx;
        for (std::size_t i = 0; i < d; ++i) factor[i * d + i] += 1e-8;
        if (!cholesky(factor, d)) throw NumericError("linear regression: normal equations singular even with ridge");
    }
    const auto beta = cholesky_solve(factor, d, xty);
    m.intercept = beta[0];
    m.slopes.assign(beta.begin() + 1, beta.end());
    return m;
}

double predict_linear(const LinearModel& model, std::span<const double> features) {
    if (features.size() != model.slopes.size()) throw ShapeError("linear: feature count mismatch");
    double y = model.intercept;
    for (std::size_t j = 0; j < features.size(); ++j) y += model.slopes[j] * features[j];
    return y;
}

nlohmann::json to_json(const LogisticModel& model) {
    return {{"type", "logistic_regression"}, {"weights", model.weights}, {"bias", model.bias}};
}

nlohmann::json to_json(const LinearModel& model) {
    return {{"type", "linear_regression"},
            {"intercept", model.intercept},
            {"slopes", model.slopes},
            {"rank_deficient", model.rank_deficient}};
}

} // namespace weekcast::baselines
