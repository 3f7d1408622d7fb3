#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace weekcast {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid input data (CSV, feature tables, report directories).
class DataError : public Error {
public:
    using Error::Error;
};

/// Experiment configuration that fails validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Tensor or network shapes that do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Non-finite intermediate value in a forward or backward pass.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or gradient during training.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t epoch, std::size_t batch)
        : Error(what + " (epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch) + ")"),
          epoch_(epoch), batch_(batch) {}

    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t batch() const noexcept { return batch_; }

private:
    std::size_t epoch_;
    std::size_t batch_;
};

} // namespace weekcast
