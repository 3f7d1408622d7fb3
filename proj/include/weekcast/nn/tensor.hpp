#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace weekcast::nn {

using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

std::string shape_to_string(const Shape& shape);

/// Dense row-major array of doubles.
struct Tensor {
    Shape shape;
    std::vector<double> values;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(std::move(s)), values(element_count(shape), 0.0) {}
    Tensor(Shape s, std::vector<double> v);

    std::size_t size() const noexcept { return values.size(); }
    std::size_t rank() const noexcept { return shape.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }

    std::span<double> data() noexcept { return values; }
    std::span<const double> data() const noexcept { return values; }

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    /// Contiguous slice along the leading dimension.
    std::span<const double> row(std::size_t i) const;
    std::span<double> row(std::size_t i);

    bool all_finite() const;
    void fill(double v);

    bool operator==(const Tensor&) const = default;
};

/// Throws ShapeError unless shapes are identical.
void require_same_shape(const Tensor& a, const Tensor& b, const char* what);

} // namespace weekcast::nn
