#include "weekcast/nn/kernels.hpp"

#include <algorithm>
#include <cstdint>

namespace weekcast::nn::kernels::parallel {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kMinParallelWork = 1 << 14;

using Index = std::int64_t;

} // namespace

void conv1d_forward(const Conv1dDims& d, In input, In weights, In bias, Out output) {
    const std::size_t P = d.out_length();
    const std::size_t KC = d.kernel * d.channels;
    const Index rows = static_cast<Index>(d.batch * P);
#pragma omp parallel for schedule(static) if (d.batch * P * d.filters * KC >= kMinParallelWork)
    for (Index r = 0; r < rows; ++r) {
        const std::size_t b = static_cast<std::size_t>(r) / P;
        const std::size_t p = static_cast<std::size_t>(r) % P;
        // The receptive field of output p is one contiguous block of K*C inputs.
        const double* window = input.data() + (b * d.length + p) * d.channels;
        double* out = output.data() + static_cast<std::size_t>(r) * d.filters;
        for (std::size_t f = 0; f < d.filters; ++f) {
            const double* w = weights.data() + f * KC;
            double acc = bias[f];
            for (std::size_t i = 0; i < KC; ++i) acc += window[i] * w[i];
            out[f] = acc;
        }
    }
}

void conv1d_backward_input(const Conv1dDims& d, In grad_out, In weights, Out grad_in) {
    const std::size_t P = d.out_length();
    const std::size_t KC = d.kernel * d.channels;
    const Index batch = static_cast<Index>(d.batch);
#pragma omp parallel for schedule(static) if (d.batch * P * d.filters * KC >= kMinParallelWork)
    for (Index bi = 0; bi < batch; ++bi) {
        const std::size_t b = static_cast<std::size_t>(bi);
        double* gin = grad_in.data() + b * d.length * d.channels;
        std::fill(gin, gin + d.length * d.channels, 0.0);
        for (std::size_t p = 0; p < P; ++p) {
            double* window = gin + p * d.channels;
            for (std::size_t f = 0; f < d.filters; ++f) {
                const double g = grad_out[(b * P + p) * d.filters + f];
                const double* w = weights.data() + f * KC;
                for (std::size_t i = 0; i < KC; ++i) window[i] += g * w[i];
            }
        }
    }
}

void conv1d_backward_params(const Conv1dDims& d, In input, In grad_out, Out grad_w, Out grad_b) {
    const std::size_t P = d.out_length();
    const std::size_t KC = d.kernel * d.channels;
    const Index filters = static_cast<Index>(d.filters);
#pragma omp parallel for schedule(static) if (d.batch * P * d.filters * KC >= kMinParallelWork)
    for (Index fi = 0; fi < filters; ++fi) {
        const std::size_t f = static_cast<std::size_t>(fi);
        double* gw = grad_w.data() + f * KC;
        std::fill(gw, gw + KC, 0.0);
        double gb = 0.0;
        for (std::size_t b = 0; b < d.batch; ++b)
            for (std::size_t p = 0; p < P; ++p) {
                const double g = grad_out[(b * P + p) * d.filters + f];
                gb += g;
                const double* window = input.data() + (b * d.length + p) * d.channels;
                for (std::size_t i = 0; i < KC; ++i) gw[i] += g * window[i];
            }
        grad_b[f] = gb;
    }
}

void maxpool1d_forward(const PoolDims& d, In input, Out output) {
    const std::size_t P = d.out_length();
    const Index batch = static_cast<Index>(d.batch);
#pragma omp parallel for schedule(static) if (d.batch * d.length * d.channels >= kMinParallelWork)
    for (Index bi = 0; bi < batch; ++bi) {
        const std::size_t b = static_cast<std::size_t>(bi);
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t c = 0; c < d.channels; ++c) {
                const double* col = input.data() + (b * d.length + i * d.pool) * d.channels + c;
                double best = col[0];
                for (std::size_t j = 1; j < d.pool; ++j) best = std::max(best, col[j * d.channels]);
                output[(b * P + i) * d.channels + c] = best;
            }
    }
}

void maxpool1d_backward(const PoolDims& d, In input, In grad_out, Out grad_in) {
    const std::size_t P = d.out_length();
    const Index batch = static_cast<Index>(d.batch);
#pragma omp parallel for schedule(static) if (d.batch * d.length * d.channels >= kMinParallelWork)
    for (Index bi = 0; bi < batch; ++bi) {
        const std::size_t b = static_cast<std::size_t>(bi);
        double* gin = grad_in.data() + b * d.length * d.channels;
        std::fill(gin, gin + d.length * d.channels, 0.0);
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t c = 0; c < d.channels; ++c) {
                const double* col = input.data() + (b * d.length + i * d.pool) * d.channels + c;
                std::size_t arg = 0;
                for (std::size_t j = 1; j < d.pool; ++j)
                    if (col[j * d.channels] > col[arg * d.channels]) arg = j;
                gin[(i * d.pool + arg) * d.channels + c] += grad_out[(b * P + i) * d.channels + c];
            }
    }
}

void dense_forward(const DenseDims& d, In input, In weights, In bias, Out output) {
    const Index batch = static_cast<Index>(d.batch);
#pragma omp parallel for schedule(static) if (d.batch * d.units * d.inputs >= kMinParallelWork)
    for (Index bi = 0; bi < batch; ++bi) {
        const std::size_t b = static_cast<std::size_t>(bi);
        const double* x = input.data() + b * d.inputs;
        for (std::size_t m = 0; m < d.units; ++m) {
            const double* w = weights.data() + m * d.inputs;
            double acc = bias[m];
            for (std::size_t n = 0; n < d.inputs; ++n) acc += x[n] * w[n];
            output[b * d.units + m] = acc;
        }
    }
}

void dense_backward_input(const DenseDims& d, In grad_out, In weights, Out grad_in) {
    const Index batch = static_cast<Index>(d.batch);
#pragma omp parallel for schedule(static) if (d.batch * d.units * d.inputs >= kMinParallelWork)
    for (Index bi = 0; bi < batch; ++bi) {
        const std::size_t b = static_cast<std::size_t>(bi);
        double* gx = grad_in.data() + b * d.inputs;
        std::fill(gx, gx + d.inputs, 0.0);
        for (std::size_t m = 0; m < d.units; ++m) {
            const double g = grad_out[b * d.units + m];
            const double* w = weights.data() + m * d.inputs;
            for (std::size_t n = 0; n < d.inputs; ++n) gx[n] += g * w[n];
        }
    }
}

void dense_backward_params(const DenseDims& d, In input, In grad_out, Out grad_w, Out grad_b) {
    const Index units = static_cast<Index>(d.units);
#pragma omp parallel for schedule(static) if (d.batch * d.units * d.inputs >= kMinParallelWork)
    for (Index mi = 0; mi < units; ++mi) {
        const std::size_t m = static_cast<std::size_t>(mi);
        double* gw = grad_w.data() + m * d.inputs;
        std::fill(gw, gw + d.inputs, 0.0);
        double gb = 0.0;
        for (std::size_t b = 0; b < d.batch; ++b) {
            const double g = grad_out[b * d.units + m];
            gb += g;
            const double* x = input.data() + b * d.inputs;
            for (std::size_t n = 0; n < d.inputs; ++n) gw[n] += g * x[n];
        }
        grad_b[m] = gb;
    }
}

void relu_forward(In input, Out output) {
    const Index n = static_cast<Index>(input.size());
#pragma omp parallel for schedule(static) if (input.size() >= kMinParallelWork)
    for (Index i = 0; i < n; ++i) output[i] = input[i] > 0.0 ? input[i] : 0.0;
}

void relu_backward(In input, In grad_out, Out grad_in) {
    const Index n = static_cast<Index>(input.size());
#pragma omp parallel for schedule(static) if (input.size() >= kMinParallelWork)
    for (Index i = 0; i < n; ++i) grad_in[i] = input[i] > 0.0 ? grad_out[i] : 0.0;
}

} // namespace weekcast::nn::kernels::parallel
