#include "weekcast/nn/tensor.hpp"

#include "weekcast/error.hpp"

#include <algorithm>
#include <cmath>

namespace weekcast::nn {

std::string shape_to_string(const Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

Tensor::Tensor(Shape s, std::vector<double> v) : shape(std::move(s)), values(std::move(v)) {
    if (values.size() != element_count(shape)) {
        throw ShapeError("tensor of shape " + shape_to_string(shape) + " given " + std::to_string(values.size()) +
                         " values");
    }
}

std::span<const double> Tensor::row(std::size_t i) const {
    const std::size_t stride = shape.empty() ? 1 : values.size() / shape[0];
    return std::span<const double>(values).subspan(i * stride, stride);
}

std::span<double> Tensor::row(std::size_t i) {
    const std::size_t stride = shape.empty() ? 1 : values.size() / shape[0];
    return std::span<double>(values).subspan(i * stride, stride);
}

bool Tensor::all_finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(values.begin(), values.end(), v); }

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (a.shape != b.shape) {
        throw ShapeError(std::string(what) + ": shape " + shape_to_string(a.shape) + " vs " +
                         shape_to_string(b.shape));
    }
}

} // namespace weekcast::nn
