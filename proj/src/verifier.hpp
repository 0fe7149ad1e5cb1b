#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tensor.hpp"

namespace decof {

// Temporal-consistency classifier: a learnable class token plus positional
// table feeding pre-norm transformer encoder blocks and a small head that
// emits (real, generated) logits.
struct VerifierConfig {
    int64_t seq_len = 8;     // frames per video fed to the model
    int64_t width = 768;     // feature dimension of each frame embedding
    int64_t layers = 2;
    int64_t heads = 4;
    int64_t mlp_hidden = 768;
    double dropout = 0.1;
    int64_t head_hidden = 0; // 0 = layernorm + single linear head

    void validate() const;
    bool operator==(const VerifierConfig&) const = default;
};

template <typename T>
struct LayerParamsT {
    Tens<T> ln1_scale, ln1_bias;
    Tens<T> wq, bq, wk, bk, wv, bv, wo, bo; // w*: [D, D], b*: [D]
    Tens<T> ln2_scale, ln2_bias;
    Tens<T> mlp_w1, mlp_b1; // [D, M], [M]
    Tens<T> mlp_w2, mlp_b2; // [M, D], [D]
};

// Full learnable state. Gradients share the tree so the optimizer and the
// checkpoint writer walk parameters and gradients identically.
template <typename T>
struct VerifierParamsT {
    VerifierConfig config;
    Tens<T> class_embedding;      // [D]
    Tens<T> positional_embedding; // [L+1, D]
    std::vector<LayerParamsT<T>> layers;
    Tens<T> head_ln_scale, head_ln_bias; // [D]
    Tens<T> head_hidden_w, head_hidden_b; // [D, H], [H]; empty when head_hidden == 0
    Tens<T> head_w; // [D or H, 2]
    Tens<T> head_b; // [2]

    // Visits every tensor in canonical (checkpoint) order.
    void for_each(const std::function<void(const std::string&, Tens<T>&)>& fn);
    void for_each(const std::function<void(const std::string&, const Tens<T>&)>& fn) const;

    int64_t param_count() const;
    bool all_finite() const;
};

using VerifierParams = VerifierParamsT<float>;
using Gradients = VerifierParamsT<float>;
using Gradients64 = VerifierParamsT<double>;

template <typename T>
struct LayerTraceT {
    Tens<T> x_in;                // [T, D] block input
    std::vector<T> ln1_mean, ln1_rstd;
    Tens<T> xhat1;               // [T, D]
    Tens<T> q, k, v;             // [T, D]
    Tens<T> att;                 // [heads, T, T] softmax probabilities (pre-dropout)
    Tens<T> att_mask;            // dropout multipliers; empty in eval mode
    Tens<T> ctx;                 // [T, D] attention output before the out projection
    Tens<T> x_mid;               // [T, D] after attention residual
    std::vector<T> ln2_mean, ln2_rstd;
    Tens<T> xhat2;               // [T, D]
    Tens<T> z1;                  // [T, M] pre-GELU
    Tens<T> a1;                  // [T, M] post-GELU
    Tens<T> mlp_mask;            // [T, D] dropout multipliers; empty in eval mode
};

template <typename T>
struct ForwardTraceT {
    VerifierConfig config;
    Tens<T> input;              // [L, D] feature sequence as given
    std::vector<LayerTraceT<T>> layers;
    Tens<T> x_final;            // [T, D]
    T head_ln_mean = T(0), head_ln_rstd = T(0);
    Tens<T> head_xhat;          // [D]
    Tens<T> head_in;            // [D or H] input row of the final linear
    Tens<T> head_hidden_z;      // [H] pre-GELU, when head_hidden > 0
    Tens<T> logits;             // [2]
    uint64_t rng_seed = 0;
    bool training = false;
};

using ForwardTrace = ForwardTraceT<float>;

// All weights N(0, 0.02), all biases zero, layernorm scales one, final head
// linear zero. Deterministic in seed; draw order is the canonical tensor order.
VerifierParams init_params(const VerifierConfig& config, uint64_t seed);

template <typename T>
ForwardTraceT<T> verifier_forward(const Tens<T>& features, const VerifierParamsT<T>& params,
                                  bool training, uint64_t seed);

template <typename T>
VerifierParamsT<T> verifier_backward(const ForwardTraceT<T>& trace, const Tens<T>& dlogits,
                                     const VerifierParamsT<T>& params);

// Zero-initialized tree with the same shapes as `like`.
template <typename T>
VerifierParamsT<T> zeros_like(const VerifierParamsT<T>& like);

template <typename T>
VerifierParamsT<T> cast_params(const VerifierParams& params);

// p(generated) from a trained model, eval mode. Label convention: 1 = generated.
float predict_score(const Tensor& features, const VerifierParams& params);

float logits_to_score(float logit_real, float logit_generated);

} // namespace decof
