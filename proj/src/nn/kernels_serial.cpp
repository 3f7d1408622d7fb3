#include "weekcast/nn/kernels.hpp"

namespace weekcast::nn::kernels::serial {

// Layouts: conv input [B, L, C], weights [F, K, C], output [B, L-K+1, F];
// dense input [B, N], weights [M, N], output [B, M].

void conv1d_forward(const Conv1dDims& d, In input, In weights, In bias, Out output) {
    const std::size_t P = d.out_length();
    for (std::size_t b = 0; b < d.batch; ++b)
        for (std::size_t p = 0; p < P; ++p)
            for (std::size_t f = 0; f < d.filters; ++f) {
                double acc = bias[f];
                for (std::size_t k = 0; k < d.kernel; ++k)
                    for (std::size_t c = 0; c < d.channels; ++c)
                        acc += input[(b * d.length + p + k) * d.channels + c] *
                               weights[(f * d.kernel + k) * d.channels + c];
                output[(b * P + p) * d.filters + f] = acc;
            }
}

void conv1d_backward_input(const Conv1dDims& d, In grad_out, In weights, Out grad_in) {
    const std::size_t P = d.out_length();
    for (std::size_t b = 0; b < d.batch; ++b)
        for (std::size_t q = 0; q < d.length; ++q)
            for (std::size_t c = 0; c < d.channels; ++c) {
                double acc = 0.0;
                // p = q - k must lie in [0, P); visit p ascending.
                const std::size_t p_lo = q + 1 > d.kernel ? q + 1 - d.kernel : 0;
                const std::size_t p_hi = q < P ? q : P - 1;
                for (std::size_t p = p_lo; p <= p_hi && p < P; ++p)
                    for (std::size_t f = 0; f < d.filters; ++f)
                        acc += grad_out[(b * P + p) * d.filters + f] *
                               weights[(f * d.kernel + (q - p)) * d.channels + c];
                grad_in[(b * d.length + q) * d.channels + c] = acc;
            }
}

void conv1d_backward_params(const Conv1dDims& d, In input, In grad_out, Out grad_w, Out grad_b) {
    const std::size_t P = d.out_length();
    for (std::size_t f = 0; f < d.filters; ++f) {
        double acc_b = 0.0;
        for (std::size_t b = 0; b < d.batch; ++b)
            for (std::size_t p = 0; p < P; ++p) acc_b += grad_out[(b * P + p) * d.filters + f];
        grad_b[f] = acc_b;
        for (std::size_t k = 0; k < d.kernel; ++k)
            for (std::size_t c = 0; c < d.channels; ++c) {
                double acc = 0.0;
                for (std::size_t b = 0; b < d.batch; ++b)
                    for (std::size_t p = 0; p < P; ++p)
                        acc += grad_out[(b * P + p) * d.filters + f] *
                               input[(b * d.length + p + k) * d.channels + c];
                grad_w[(f * d.kernel + k) * d.channels + c] = acc;
            }
    }
}

void maxpool1d_forward(const PoolDims& d, In input, Out output) {
    const std::size_t P = d.out_length();
    for (std::size_t b = 0; b < d.batch; ++b)
        for (std::size_t i = 0; i < P; ++i)
            for (std::size_t c = 0; c < d.channels; ++c) {
                double best = input[(b * d.length + i * d.pool) * d.channels + c];
                for (std::size_t j = 1; j < d.pool; ++j) {
                    const double v = input[(b * d.length + i * d.pool + j) * d.channels + c];
                    if (v > best) best = v;
                }
                output[(b * P + i) * d.channels + c] = best;
            }
}

void maxpool1d_backward(const PoolDims& d, In input, In grad_out, Out grad_in) {
    const std::size_t P = d.out_length();
    for (std::size_t b = 0; b < d.batch; ++b)
        for (std::size_t q = 0; q < d.length; ++q)
            for (std::size_t c = 0; c < d.channels; ++c) {
                double g = 0.0;
                const std::size_t i = q / d.pool;
                if (i < P) {
                    std::size_t arg = i * d.pool;  // first maximal index wins
                    for (std::size_t j = i * d.pool + 1; j < (i + 1) * d.pool; ++j)
                        if (input[(b * d.length + j) * d.channels + c] > input[(b * d.length + arg) * d.channels + c])
                            arg = j;
                    if (arg == q) g = grad_out[(b * P + i) * d.channels + c];
                }
                grad_in[(b * d.length + q) * d.channels + c] = g;
            }
}

void dense_forward(const DenseDims& d, In input, In weights, In bias, Out output) {
    for (std::size_t b = 0; b < d.batch; ++b)
        for (std::size_t m = 0; m < d.units; ++m) {
            double acc = bias[m];
            for (std::size_t n = 0; n < d.inputs; ++n) acc += input[b * d.inputs + n] * weights[m * d.inputs + n];
            output[b * d.units + m] = acc;
        }
}

void dense_backward_input(const DenseDims& d, In grad_out, In weights, Out grad_in) {
    for (std::size_t b = 0; b < d.batch; ++b)
        for (std::size_t n = 0; n < d.inputs; ++n) {
            double acc = 0.0;
            for (std::size_t m = 0; m < d.units; ++m) acc += grad_out[b * d.units + m] * weights[m * d.inputs + n];
            grad_in[b * d.inputs + n] = acc;
        }
}

void dense_backward_params(const DenseDims& d, In input, In grad_out, Out grad_w, Out grad_b) {
    for (std::size_t m = 0; m < d.units; ++m) {
        double acc_b = 0.0;
        for (std::size_t b = 0; b < d.batch; ++b) acc_b += grad_out[b * d.units + m];
        grad_b[m] = acc_b;
        for (std::size_t n = 0; n < d.inputs; ++n) {
            double acc = 0.0;
            for (std::size_t b = 0; b < d.batch; ++b) acc += grad_out[b * d.units + m] * input[b * d.inputs + n];
            grad_w[m * d.inputs + n] = acc;
        }
    }
}

void relu_forward(In input, Out output) {
    for (std::size_t i = 0; i < input.size(); ++i) output[i] = input[i] > 0.0 ? input[i] : 0.0;
}

void relu_backward(In input, In grad_out, Out grad_in) {
    for (std::size_t i = 0; i < input.size(); ++i) grad_in[i] = input[i] > 0.0 ? grad_out[i] : 0.0;
}

} // namespace weekcast::nn::kernels::serial
