#include "gradcheck.hpp"

#include <vector>

#include "loss.hpp"

namespace decof {

double loss_at(const VerifierParamsT<double>& params, const Tensor64& features, int label) {
    ForwardTraceT<double> trace = verifier_forward(features, params, /*training=*/false, 0);
    return softmax_cross_entropy(trace.logits, label).loss;
}

Gradients64 finite_difference_grad(const VerifierParams& params, const Tensor& features,
                                   int label, double h) {
    if (h <= 0.0) throw config_error("finite difference step must be > 0");
    VerifierParamsT<double> p64 = cast_params<double>(params);
    const Tensor64 f64 = features.cast<double>();

    Gradients64 grad = zeros_like(p64);
    std::vector<Tens<double>*> param_tensors;
    p64.for_each([&](const std::string&, Tens<double>& t) { param_tensors.push_back(&t); });
    std::vector<Tens<double>*> grad_tensors;
    grad.for_each([&](const std::string&, Tens<double>& t) { grad_tensors.push_back(&t); });

    for (size_t ti = 0; ti < param_tensors.size(); ++ti) {
        Tens<double>& t = *param_tensors[ti];
        for (size_t i = 0; i < t.data.size(); ++i) {
            const double orig = t.data[i];
            t.data[i] = orig + h;
            const double lp = loss_at(p64, f64, label);
            t.data[i] = orig - h;
            const double lm = loss_at(p64, f64, label);
            t.data[i] = orig;
            grad_tensors[ti]->data[i] = (lp - lm) / (2.0 * h);
        }
    }
    return grad;
}

} // namespace decof
