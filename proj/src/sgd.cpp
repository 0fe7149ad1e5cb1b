#include "sgd.hpp"

#include <vector>

namespace decof {

void sgd_momentum_step(VerifierParams& params, const Gradients& grads, VerifierParams& velocity,
                       float lr, float momentum) {
    std::vector<Tensor*> p, v;
    std::vector<const Tensor*> g;
    params.for_each([&](const std::string&, Tensor& t) { p.push_back(&t); });
    velocity.for_each([&](const std::string&, Tensor& t) { v.push_back(&t); });
    grads.for_each([&](const std::string&, const Tensor& t) { g.push_back(&t); });
    if (p.size() != g.size() || p.size() != v.size())
        throw runtime_error("parameter/gradient/velocity trees differ in tensor count");

    for (size_t i = 0; i < p.size(); ++i) {
        if (!p[i]->same_shape(*g[i]) || !p[i]->same_shape(*v[i]))
            throw runtime_error("parameter/gradient/velocity shape mismatch at tensor " +
                                std::to_string(i));
        float* pp = p[i]->ptr();
        float* vp = v[i]->ptr();
        const float* gp = g[i]->ptr();
        const int64_t n = p[i]->numel();
        for (int64_t k = 0; k < n; ++k) {
            vp[k] = momentum * vp[k] + gp[k];
            pp[k] -= lr * vp[k];
        }
    }
}

} // namespace decof
