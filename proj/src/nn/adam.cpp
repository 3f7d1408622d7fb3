#include "weekcast/nn/adam.hpp"

#include "weekcast/error.hpp"

#include <cmath>

namespace weekcast::nn {

AdamState AdamState::fresh(const Params& params, AdamHyper hyper) {
    return {hyper, params.zeros_like(), params.zeros_like(), 0};
}

void adam_update(Params& params, const Params& gradients, AdamState& state) {
    auto p = params.tensors();
    const auto g = gradients.tensors();
    auto m = state.first_moment.tensors();
    auto v = state.second_moment.tensors();
    if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
        throw ShapeError("adam: parameter, gradient and moment layouts differ");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        require_same_shape(*p[i], *g[i], "adam gradient");
        require_same_shape(*p[i], *m[i], "adam moment");
        require_same_shape(*p[i], *v[i], "adam moment");
    }
    if (!gradients.all_finite()) throw NumericError("adam: non-finite gradient");

    const auto& h = state.hyper;
    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(h.beta1, t);
    const double correction2 = 1.0 - std::pow(h.beta2, t);
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto& pv = p[i]->values;
        const auto& gv = g[i]->values;
        auto& mv = m[i]->values;
        auto& vv = v[i]->values;
        for (std::size_t j = 0; j < pv.size(); ++j) {
            mv[j] = h.beta1 * mv[j] + (1.0 - h.beta1) * gv[j];
            vv[j] = h.beta2 * vv[j] + (1.0 - h.beta2) * gv[j] * gv[j];
            const double m_hat = mv[j] / correction1;
            const double v_hat = vv[j] / correction2;
            pv[j] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
        }
    }
}

} // namespace weekcast::nn
