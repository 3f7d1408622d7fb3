#include "weekcast/nn/network.hpp"

#include "weekcast/error.hpp"
#include "weekcast/random.hpp"

#include <algorithm>
#include <cmath>

namespace weekcast::nn {

std::string_view layer_kind_name(LayerKind kind) {
    switch (kind) {
    case LayerKind::input: return "input";
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::maxpool1d: return "maxpool1d";
    case LayerKind::dense: return "dense";
    case LayerKind::relu: return "relu";
    case LayerKind::flatten: return "flatten";
    case LayerKind::concat: return "concat";
    }
    return "?";
}

namespace {

[[noreturn]] void shape_fail(const std::string& id, const std::string& why) {
    throw ShapeError("layer " + id + ": " + why);
}

bool has_params(LayerKind kind) { return kind == LayerKind::conv1d || kind == LayerKind::dense; }

Shape infer_shape(const std::string& id, const LayerSpec& layer, const std::vector<const Shape*>& in) {
    const auto single = [&]() -> const Shape& {
        if (in.size() != 1) shape_fail(id, "expects exactly one input");
        return *in[0];
    };
    switch (layer.kind) {
    case LayerKind::input: {
        if (!in.empty()) shape_fail(id, "input layer takes no inputs");
        const auto& s = layer.input_shape;
        if (s.empty() || s.size() > 2 || element_count(s) == 0) shape_fail(id, "input shape must be [n] or [length, channels]");
        return s;
    }
    case LayerKind::conv1d: {
        const auto& s = single();
        if (s.size() != 2) shape_fail(id, "conv1d expects [length, channels], got " + shape_to_string(s));
        if (layer.filters == 0 || layer.kernel == 0) shape_fail(id, "filters and kernel must be positive");
        if (layer.kernel > s[0]) shape_fail(id, "kernel " + std::to_string(layer.kernel) + " exceeds length " + std::to_string(s[0]));
        return {s[0] - layer.kernel + 1, layer.filters};
    }
    case LayerKind::maxpool1d: {
        const auto& s = single();
        if (s.size() != 2) shape_fail(id, "maxpool1d expects [length, channels], got " + shape_to_string(s));
        if (layer.pool == 0) shape_fail(id, "pool size must be positive");
        if (s[0] / layer.pool == 0) shape_fail(id, "pooling produces an empty sequence");
        return {s[0] / layer.pool, s[1]};
    }
    case LayerKind::dense: {
        const auto& s = single();
        if (s.size() != 1) shape_fail(id, "dense expects a vector, got " + shape_to_string(s));
        if (layer.units == 0) shape_fail(id, "units must be positive");
        return {layer.units};
    }
    case LayerKind::relu: return single();
    case LayerKind::flatten: return {element_count(single())};
    case LayerKind::concat: {
        if (in.empty()) shape_fail(id, "concat needs at least one input");
        std::size_t total = 0;
        for (const auto* s : in) {
            if (s->size() != 1) shape_fail(id, "concat inputs must be vectors, got " + shape_to_string(*s));
            total += (*s)[0];
        }
        return {total};
    }
    }
    shape_fail(id, "unknown layer kind");
}

} // namespace

NodeId NetworkSpec::add(LayerSpec layer, std::vector<NodeId> inputs, std::string id) {
    if (id.empty()) {
        const auto same_kind = std::count_if(nodes_.begin(), nodes_.end(),
                                             [&](const Node& n) { return n.layer.kind == layer.kind; });
        id = std::string(layer_kind_name(layer.kind)) + "_" + std::to_string(same_kind);
    }
    for (const auto& n : nodes_) {
        if (n.id == id) throw ShapeError("duplicate layer id " + id);
    }
    std::vector<const Shape*> in_shapes;
    for (NodeId i : inputs) {
        if (i >= nodes_.size()) shape_fail(id, "refers to a layer that does not exist yet");
        in_shapes.push_back(&nodes_[i].output_shape);
    }
    Shape out = infer_shape(id, layer, in_shapes);
    slots_.push_back(has_params(layer.kind) ? next_slot_++ : npos);
    nodes_.push_back({std::move(id), std::move(layer), std::move(inputs), std::move(out)});
    return nodes_.size() - 1;
}

NodeId NetworkSpec::input(Shape shape) {
    LayerSpec l;
    l.kind = LayerKind::input;
    l.input_shape = std::move(shape);
    return add(std::move(l), {});
}

NodeId NetworkSpec::conv1d(NodeId from, std::size_t filters, std::size_t kernel) {
    LayerSpec l;
    l.kind = LayerKind::conv1d;
    l.filters = filters;
    l.kernel = kernel;
    return add(std::move(l), {from});
}

NodeId NetworkSpec::maxpool1d(NodeId from, std::size_t pool) {
    LayerSpec l;
    l.kind = LayerKind::maxpool1d;
    l.pool = pool;
    return add(std::move(l), {from});
}

NodeId NetworkSpec::dense(NodeId from, std::size_t units) {
    LayerSpec l;
    l.kind = LayerKind::dense;
    l.units = units;
    return add(std::move(l), {from});
}

namespace {

LayerSpec plain(LayerKind kind) {
    LayerSpec l;
    l.kind = kind;
    return l;
}

} // namespace

NodeId NetworkSpec::relu(NodeId from) { return add(plain(LayerKind::relu), {from}); }
NodeId NetworkSpec::flatten(NodeId from) { return add(plain(LayerKind::flatten), {from}); }
NodeId NetworkSpec::concat(std::vector<NodeId> from) { return add(plain(LayerKind::concat), std::move(from)); }

std::vector<NodeId> NetworkSpec::heads() const {
    std::vector<NodeId> out;
    for (NodeId i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].layer.kind == LayerKind::input) out.push_back(i);
    }
    return out;
}

NodeId NetworkSpec::output() const {
    if (nodes_.empty()) throw ShapeError("empty network");
    return nodes_.size() - 1;
}

void NetworkSpec::validate() const {
    const NodeId out = output();
    if (nodes_[out].layer.kind != LayerKind::dense) throw ShapeError("network output must be a dense layer");
    std::vector<bool> reaches(nodes_.size(), false);
    reaches[out] = true;
    for (NodeId i = nodes_.size(); i-- > 0;) {
        if (!reaches[i]) continue;
        for (NodeId j : nodes_[i].inputs) reaches[j] = true;
    }
    const auto hs = heads();
    if (hs.empty()) throw ShapeError("network has no input head");
    for (NodeId h : hs) {
        if (!reaches[h]) throw ShapeError("input head " + nodes_[h].id + " does not reach the output");
    }
}

std::size_t NetworkSpec::param_slot(NodeId id) const { return slots_.at(id); }

std::size_t NetworkSpec::parameter_count() const { return zero_params(*this).parameter_count(); }

std::size_t Params::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

bool Params::all_finite() const {
    return std::all_of(layers.begin(), layers.end(),
                       [](const LayerParams& l) { return l.weight.all_finite() && l.bias.all_finite(); });
}

std::vector<Tensor*> Params::tensors() {
    std::vector<Tensor*> out;
    for (auto& l : layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

std::vector<const Tensor*> Params::tensors() const {
    std::vector<const Tensor*> out;
    for (const auto& l : layers) {
        out.push_back(&l.weight);
        out.push_back(&l.bias);
    }
    return out;
}

Params Params::zeros_like() const {
    Params out;
    for (const auto& l : layers) out.layers.push_back({l.id, Tensor(l.weight.shape), Tensor(l.bias.shape)});
    return out;
}

Params zero_params(const NetworkSpec& spec) {
    Params out;
    for (const auto& n : spec.nodes()) {
        if (n.layer.kind == LayerKind::conv1d) {
            const auto& in = spec.node(n.inputs[0]).output_shape;
            out.layers.push_back({n.id, Tensor({n.layer.filters, n.layer.kernel, in[1]}), Tensor({n.layer.filters})});
        } else if (n.layer.kind == LayerKind::dense) {
            const auto& in = spec.node(n.inputs[0]).output_shape;
            out.layers.push_back({n.id, Tensor({n.layer.units, in[0]}), Tensor({n.layer.units})});
        }
    }
    return out;
}

Params init_params(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    Params out = zero_params(spec);
    Rng rng(seed);
    for (auto& l : out.layers) {
        const auto& s = l.weight.shape;
        // conv1d [F, K, C]: fan_in = K*C, fan_out = K*F. dense [M, N]: fan_in = N, fan_out = M.
        const double fan_in = s.size() == 3 ? static_cast<double>(s[1] * s[2]) : static_cast<double>(s[1]);
        const double fan_out = s.size() == 3 ? static_cast<double>(s[1] * s[0]) : static_cast<double>(s[0]);
        const double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& w : l.weight.values) w = rng.uniform(-bound, bound);
    }
    return out;
}

void check_params(const NetworkSpec& spec, const Params& params) {
    std::size_t slot = 0;
    for (const auto& n : spec.nodes()) {
        if (n.layer.kind != LayerKind::conv1d && n.layer.kind != LayerKind::dense) continue;
        if (slot >= params.layers.size()) throw ShapeError("params are missing layer " + n.id);
        const auto& p = params.layers[slot++];
        const auto& in = spec.node(n.inputs[0]).output_shape;
        const Shape weight = n.layer.kind == LayerKind::conv1d ? Shape{n.layer.filters, n.layer.kernel, in[1]}
                                                               : Shape{n.layer.units, in[0]};
        const Shape bias{n.layer.kind == LayerKind::conv1d ? n.layer.filters : n.layer.units};
        if (p.id != n.id || p.weight.shape != weight || p.bias.shape != bias) {
            throw ShapeError("params for layer " + n.id + " do not match the network");
        }
    }
    if (slot != params.layers.size()) throw ShapeError("params hold layers the network does not have");
}

namespace {

struct KernelTable {
    decltype(&kernels::serial::conv1d_forward) conv1d_forward;
    decltype(&kernels::serial::conv1d_backward_input) conv1d_backward_input;
    decltype(&kernels::serial::conv1d_backward_params) conv1d_backward_params;
    decltype(&kernels::serial::maxpool1d_forward) maxpool1d_forward;
    decltype(&kernels::serial::maxpool1d_backward) maxpool1d_backward;
    decltype(&kernels::serial::dense_forward) dense_forward;
    decltype(&kernels::serial::dense_backward_input) dense_backward_input;
    decltype(&kernels::serial::dense_backward_params) dense_backward_params;
    decltype(&kernels::serial::relu_forward) relu_forward;
    decltype(&kernels::serial::relu_backward) relu_backward;
};

const KernelTable& kernel_table(kernels::Backend backend) {
    namespace s = kernels::serial;
    namespace p = kernels::parallel;
    static const KernelTable serial{s::conv1d_forward,   s::conv1d_backward_input, s::conv1d_backward_params,
                                    s::maxpool1d_forward, s::maxpool1d_backward,   s::dense_forward,
                                    s::dense_backward_input, s::dense_backward_params, s::relu_forward,
                                    s::relu_backward};
    static const KernelTable parallel{p::conv1d_forward,   p::conv1d_backward_input, p::conv1d_backward_params,
                                      p::maxpool1d_forward, p::maxpool1d_backward,   p::dense_forward,
                                      p::dense_backward_input, p::dense_backward_params, p::relu_forward,
                                      p::relu_backward};
    return backend == kernels::Backend::serial ? serial : parallel;
}

Shape batched(std::size_t batch, const Shape& s) {
    Shape out{batch};
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

kernels::Conv1dDims conv_dims(const NetworkSpec& spec, const Node& n, std::size_t batch) {
    const auto& in = spec.node(n.inputs[0]).output_shape;
    return {batch, in[0], in[1], n.layer.filters, n.layer.kernel};
}

kernels::PoolDims pool_dims(const NetworkSpec& spec, const Node& n, std::size_t batch) {
    const auto& in = spec.node(n.inputs[0]).output_shape;
    return {batch, in[0], in[1], n.layer.pool};
}

kernels::DenseDims dense_dims(const NetworkSpec& spec, const Node& n, std::size_t batch) {
    return {batch, spec.node(n.inputs[0]).output_shape[0], n.layer.units};
}

std::size_t batch_size_of(const NetworkSpec& spec, std::span<const Tensor> heads) {
    const auto hs = spec.heads();
    if (heads.size() != hs.size()) {
        throw ShapeError("network has " + std::to_string(hs.size()) + " input heads, given " +
                         std::to_string(heads.size()));
    }
    if (heads.empty() || heads[0].rank() == 0) throw ShapeError("missing batch dimension");
    const std::size_t batch = heads[0].shape[0];
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const Shape want = batched(batch, spec.node(hs[i]).output_shape);
        if (heads[i].shape != want) {
            throw ShapeError("head " + std::to_string(i) + " expects " + shape_to_string(want) + ", got " +
                             shape_to_string(heads[i].shape));
        }
    }
    return batch;
}

} // namespace

ForwardTrace forward(const NetworkSpec& spec, const Params& params, std::span<const Tensor> heads,
                     kernels::Backend backend) {
    spec.validate();
    check_params(spec, params);
    const std::size_t batch = batch_size_of(spec, heads);
    const auto& k = kernel_table(backend);

    ForwardTrace trace;
    trace.activations.resize(spec.nodes().size());
    std::size_t head = 0;
    for (NodeId i = 0; i < spec.nodes().size(); ++i) {
        const Node& n = spec.node(i);
        Tensor out(batched(batch, n.output_shape));
        const auto in = [&](std::size_t j = 0) -> const Tensor& { return trace.activations[n.inputs[j]]; };
        switch (n.layer.kind) {
        case LayerKind::input: out = heads[head++]; break;
        case LayerKind::conv1d: {
            const auto& p = params.layers[spec.param_slot(i)];
            k.conv1d_forward(conv_dims(spec, n, batch), in().data(), p.weight.data(), p.bias.data(), out.data());
            break;
        }
        case LayerKind::maxpool1d: k.maxpool1d_forward(pool_dims(spec, n, batch), in().data(), out.data()); break;
        case LayerKind::dense: {
            const auto& p = params.layers[spec.param_slot(i)];
            k.dense_forward(dense_dims(spec, n, batch), in().data(), p.weight.data(), p.bias.data(), out.data());
            break;
        }
        case LayerKind::relu: k.relu_forward(in().data(), out.data()); break;
        case LayerKind::flatten: out.values = in().values; break;
        case LayerKind::concat: {
            const std::size_t width = n.output_shape[0];
            std::size_t offset = 0;
            for (std::size_t j = 0; j < n.inputs.size(); ++j) {
                const Tensor& src = in(j);
                const std::size_t w = src.size() / batch;
                for (std::size_t b = 0; b < batch; ++b) {
                    std::copy_n(src.values.begin() + static_cast<std::ptrdiff_t>(b * w), w,
                                out.values.begin() + static_cast<std::ptrdiff_t>(b * width + offset));
                }
                offset += w;
            }
            break;
        }
        }
        trace.activations[i] = std::move(out);
    }
    return trace;
}

double loss_value(LossKind kind, const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "loss");
    if (pred.size() == 0) throw ShapeError("loss of an empty tensor");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double z = pred[i];
        const double t = target[i];
        if (kind == LossKind::mse) {
            sum += (z - t) * (z - t);
        } else {
            // softplus(z) - t*z, evaluated without overflow
            sum += std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) - t * z;
        }
    }
    return sum / static_cast<double>(pred.size());
}

Tensor loss_gradient(LossKind kind, const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "loss gradient");
    Tensor g(pred.shape);
    const double scale = 1.0 / static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double z = pred[i];
        if (kind == LossKind::mse) {
            g[i] = 2.0 * (z - target[i]) * scale;
        } else {
            const double s = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
            g[i] = (s - target[i]) * scale;
        }
    }
    return g;
}

GradientResult backprop_gradients(const NetworkSpec& spec, const Params& params, std::span<const Tensor> heads,
                                  const Tensor& targets, LossKind loss, kernels::Backend backend) {
    const ForwardTrace trace = forward(spec, params, heads, backend);
    const auto& acts = trace.activations;
    const NodeId out = spec.output();
    const std::size_t batch = heads[0].shape[0];
    const auto& k = kernel_table(backend);

    GradientResult result;
    result.loss = loss_value(loss, acts[out], targets);
    if (!std::isfinite(result.loss)) throw NumericError("non-finite loss");
    result.gradients = params.zeros_like();

    std::vector<Tensor> grads(spec.nodes().size());
    grads[out] = loss_gradient(loss, acts[out], targets);

    const auto accumulate = [&](NodeId target, Tensor&& g) {
        if (grads[target].size() == 0) {
            grads[target] = std::move(g);
        } else {
            for (std::size_t i = 0; i < g.size(); ++i) grads[target][i] += g[i];
        }
    };

    for (NodeId i = spec.nodes().size(); i-- > 0;) {
        const Node& n = spec.node(i);
        if (grads[i].size() == 0 || n.layer.kind == LayerKind::input) continue;
        const Tensor& g = grads[i];
        const Tensor& x = acts[n.inputs[0]];
        switch (n.layer.kind) {
        case LayerKind::conv1d: {
            const auto d = conv_dims(spec, n, batch);
            auto& gp = result.gradients.layers[spec.param_slot(i)];
            k.conv1d_backward_params(d, x.data(), g.data(), gp.weight.data(), gp.bias.data());
            Tensor gx(x.shape);
            k.conv1d_backward_input(d, g.data(), params.layers[spec.param_slot(i)].weight.data(), gx.data());
            accumulate(n.inputs[0], std::move(gx));
            break;
        }
        case LayerKind::maxpool1d: {
            Tensor gx(x.shape);
            k.maxpool1d_backward(pool_dims(spec, n, batch), x.data(), g.data(), gx.data());
            accumulate(n.inputs[0], std::move(gx));
            break;
        }
        case LayerKind::dense: {
            const auto d = dense_dims(spec, n, batch);
            auto& gp = result.gradients.layers[spec.param_slot(i)];
            k.dense_backward_params(d, x.data(), g.data(), gp.weight.data(), gp.bias.data());
            Tensor gx(x.shape);
            k.dense_backward_input(d, g.data(), params.layers[spec.param_slot(i)].weight.data(), gx.data());
            accumulate(n.inputs[0], std::move(gx));
            break;
        }
        case LayerKind::relu: {
            Tensor gx(x.shape);
            k.relu_backward(x.data(), g.data(), gx.data());
            accumulate(n.inputs[0], std::move(gx));
            break;
        }
        case LayerKind::flatten: accumulate(n.inputs[0], Tensor(x.shape, g.values)); break;
        case LayerKind::concat: {
            const std::size_t width = n.output_shape[0];
            std::size_t offset = 0;
            for (NodeId src : n.inputs) {
                const Tensor& xs = acts[src];
                const std::size_t w = xs.size() / batch;
                Tensor gx(xs.shape);
                for (std::size_t b = 0; b < batch; ++b) {
                    std::copy_n(g.values.begin() + static_cast<std::ptrdiff_t>(b * width + offset), w,
                                gx.values.begin() + static_cast<std::ptrdiff_t>(b * w));
                }
                accumulate(src, std::move(gx));
                offset += w;
            }
            break;
        }
        case LayerKind::input: break;
        }
    }
    if (!result.gradients.all_finite()) throw NumericError("non-finite gradient");
    return result;
}

} // namespace weekcast::nn
