#pragma once

#include "weekcast/nn/kernels.hpp"
#include "weekcast/nn/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace weekcast::nn {

enum class LayerKind { input, conv1d, maxpool1d, dense, relu, flatten, concat };

std::string_view layer_kind_name(LayerKind kind);

/// One layer and its hyperparameters. Shapes are per sample: sequences are
/// [length, channels], vectors are [n].
struct LayerSpec {
    LayerKind kind = LayerKind::input;
    std::size_t filters = 0;  // conv1d
    std::size_t kernel = 0;   // conv1d
    std::size_t pool = 0;     // maxpool1d
    std::size_t units = 0;    // dense
    Shape input_shape;        // input

    bool operator==(const LayerSpec&) const = default;
};

using NodeId = std::size_t;

struct Node {
    std::string id;
    LayerSpec layer;
    std::vector<NodeId> inputs;
    Shape output_shape;
};

/// Layer DAG built in topological order. Each add call checks the layer's
/// hyperparameters against the inferred incoming shape and throws ShapeError.
/// The most recently added node is the network output.
class NetworkSpec {
public:
    NodeId input(Shape shape);
    NodeId conv1d(NodeId from, std::size_t filters, std::size_t kernel);
    NodeId maxpool1d(NodeId from, std::size_t pool);
    NodeId dense(NodeId from, std::size_t units);
    NodeId relu(NodeId from);
    NodeId flatten(NodeId from);
    NodeId concat(std::vector<NodeId> from);

    NodeId add(LayerSpec layer, std::vector<NodeId> inputs, std::string id = {});

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const Node& node(NodeId id) const { return nodes_.at(id); }
    std::vector<NodeId> heads() const;
    NodeId output() const;
    const Shape& output_shape() const { return nodes_.at(output()).output_shape; }

    /// Output must be a dense layer and every input head must reach it.
    void validate() const;

    /// Index into Params::layers for conv1d / dense nodes, npos otherwise.
    std::size_t param_slot(NodeId id) const;
    std::size_t parameter_count() const;

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

private:
    std::vector<Node> nodes_;
    std::vector<std::size_t> slots_;
    std::size_t next_slot_ = 0;
};

struct LayerParams {
    std::string id;
    Tensor weight;  // conv1d: [filters, kernel, channels]; dense: [units, inputs]
    Tensor bias;    // [filters] or [units]

    bool operator==(const LayerParams&) const = default;
};

/// Trainable parameters of every conv1d / dense node, in node order. The same
/// structure carries gradients and Adam moments.
struct Params {
    std::vector<LayerParams> layers;

    std::size_t parameter_count() const;
    bool all_finite() const;
    /// Tensors in a fixed order: layer by layer, weight then bias.
    std::vector<Tensor*> tensors();
    std::vector<const Tensor*> tensors() const;
    /// Same shapes, all zeros.
    Params zeros_like() const;

    bool operator==(const Params&) const = default;
};

/// Glorot-uniform weights, zero biases, deterministic per seed.
Params init_params(const NetworkSpec& spec, std::uint64_t seed);

/// All weights and biases zero.
Params zero_params(const NetworkSpec& spec);

/// Throws ShapeError if params do not match the spec.
void check_params(const NetworkSpec& spec, const Params& params);

/// Batched activations of every node, each [batch, ...node shape].
struct ForwardTrace {
    std::vector<Tensor> activations;
};

/// `heads` are batched tensors [batch, ...head shape] in head order.
ForwardTrace forward(const NetworkSpec& spec, const Params& params, std::span<const Tensor> heads,
                     kernels::Backend backend = kernels::Backend::parallel);

enum class LossKind {
    mse,      // mean squared error over all outputs
    logloss,  // sigmoid + binary cross-entropy on raw outputs, targets in {0, 1}
};

double loss_value(LossKind kind, const Tensor& pred, const Tensor& target);
/// dLoss/dpred for the batch-mean loss.
Tensor loss_gradient(LossKind kind, const Tensor& pred, const Tensor& target);

struct GradientResult {
    double loss = 0.0;
    Params gradients;
};

/// Exact gradients of the batch-mean loss. Max-pool routes gradient to the
/// first maximal element; the ReLU subgradient at 0 is 0. Throws NumericError
/// on non-finite values.
GradientResult backprop_gradients(const NetworkSpec& spec, const Params& params, std::span<const Tensor> heads,
                                  const Tensor& targets, LossKind loss = LossKind::mse,
                                  kernels::Backend backend = kernels::Backend::parallel);

} // namespace weekcast::nn
