#pragma once

// Batched layer kernels. `serial` holds straightforward per-element reference
// implementations; `parallel` holds loop-reordered OpenMP versions. Both sum
// every output element in the same order, so their results are bitwise equal
// and independent of the thread count.

#include <cstddef>
#include <span>

namespace weekcast::nn::kernels {

enum class Backend { serial, parallel };

struct Conv1dDims {
    std::size_t batch = 0;
    std::size_t length = 0;
    std::size_t channels = 0;
    std::size_t filters = 0;
    std::size_t kernel = 0;

    std::size_t out_length() const { return length - kernel + 1; }
};

struct PoolDims {
    std::size_t batch = 0;
    std::size_t length = 0;
    std::size_t channels = 0;
    std::size_t pool = 0;

    std::size_t out_length() const { return length / pool; }
};

struct DenseDims {
    std::size_t batch = 0;
    std::size_t inputs = 0;
    std::size_t units = 0;
};

using In = std::span<const double>;
using Out = std::span<double>;

#define WEEKCAST_KERNEL_SET                                                                  \
    void conv1d_forward(const Conv1dDims& d, In input, In weights, In bias, Out output);     \
    void conv1d_backward_input(const Conv1dDims& d, In grad_out, In weights, Out grad_in);  \
    void conv1d_backward_params(const Conv1dDims& d, In input, In grad_out, Out grad_w,      \
                                Out grad_b);                                                 \
    void maxpool1d_forward(const PoolDims& d, In input, Out output);                         \
    void maxpool1d_backward(const PoolDims& d, In input, In grad_out, Out grad_in);          \
    void dense_forward(const DenseDims& d, In input, In weights, In bias, Out output);       \
    void dense_backward_input(const DenseDims& d, In grad_out, In weights, Out grad_in);    \
    void dense_backward_params(const DenseDims& d, In input, In grad_out, Out grad_w,        \
                               Out grad_b);                                                  \
    void relu_forward(In input, Out output);                                                 \
    void relu_backward(In input, In grad_out, Out grad_in);

namespace serial {
WEEKCAST_KERNEL_SET
}

namespace parallel {
WEEKCAST_KERNEL_SET
}

#undef WEEKCAST_KERNEL_SET

} // namespace weekcast::nn::kernels
