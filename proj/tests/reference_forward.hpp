#pragma once

// Naive straight-line re-implementation of the verifier forward pass used as
// an oracle. Deliberately shares no code with the production path: plain
// double loops, no caching, eval mode only, single linear head.

#include <cassert>
#include <cmath>
#include <vector>

#include "verifier.hpp"

namespace testutil {

inline std::vector<double> reference_logits(const decof::Tensor& features,
                                            const decof::VerifierParams& params) {
    const auto& cfg = params.config;
    assert(cfg.head_hidden == 0);
    const int L = static_cast<int>(cfg.seq_len);
    const int D = static_cast<int>(cfg.width);
    const int T = L + 1;
    const int H = static_cast<int>(cfg.heads);
    const int dh = D / H;
    const double eps = 1e-5;

    auto get = [&](const decof::Tensor& t, int i, int j) {
        return static_cast<double>(t.data[static_cast<size_t>(i) * t.shape[1] + j]);
    };
    auto get1 = [&](const decof::Tensor& t, int i) { return static_cast<double>(t.data[i]); };

    // token matrix
    std::vector<std::vector<double>> x(T, std::vector<double>(D));
    for (int j = 0; j < D; ++j)
        x[0][j] = get1(params.class_embedding, j) + get(params.positional_embedding, 0, j);
    for (int t = 0; t < L; ++t)
        for (int j = 0; j < D; ++j)
            x[t + 1][j] = get(features, t, j) + get(params.positional_embedding, t + 1, j);

    auto layer_norm = [&](const std::vector<double>& row, const decof::Tensor& scale,
                          const decof::Tensor& bias) {
        double mean = 0;
        for (double v : row) mean += v;
        mean /= D;
        double var = 0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= D;
        std::vector<double> out(D);
        for (int j = 0; j < D; ++j)
            out[j] = (row[j] - mean) / std::sqrt(var + eps) * get1(scale, j) + get1(bias, j);
        return out;
    };

    auto gelu = [](double v) { return 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0))); };

    for (const auto& lp : params.layers) {
        // attention sublayer
        std::vector<std::vector<double>> normed(T);
        for (int t = 0; t < T; ++t) normed[t] = layer_norm(x[t], lp.ln1_scale, lp.ln1_bias);

        std::vector<std::vector<double>> q(T, std::vector<double>(D)), k = q, v = q;
        for (int t = 0; t < T; ++t) {
            for (int o = 0; o < D; ++o) {
                double sq = get1(lp.bq, o), sk = get1(lp.bk, o), sv = get1(lp.bv, o);
                for (int i = 0; i < D; ++i) {
                    sq += normed[t][i] * get(lp.wq, i, o);
                    sk += normed[t][i] * get(lp.wk, i, o);
                    sv += normed[t][i] * get(lp.wv, i, o);
                }
                q[t][o] = sq;
                k[t][o] = sk;
                v[t][o] = sv;
            }
        }

        std::vector<std::vector<double>> ctx(T, std::vector<double>(D, 0.0));
        for (int h = 0; h < H; ++h) {
            for (int i = 0; i < T; ++i) {
                std::vector<double> scores(T);
                double mx = -1e300;
                for (int j = 0; j < T; ++j) {
                    double s = 0;
                    for (int c = 0; c < dh; ++c) s += q[i][h * dh + c] * k[j][h * dh + c];
                    scores[j] = s / std::sqrt(static_cast<double>(dh));
                    mx = std::max(mx, scores[j]);
                }
                double z = 0;
                for (int j = 0; j < T; ++j) z += std::exp(scores[j] - mx);
                for (int j = 0; j < T; ++j) {
                    const double p = std::exp(scores[j] - mx) / z;
                    for (int c = 0; c < dh; ++c) ctx[i][h * dh + c] += p * v[j][h * dh + c];
                }
            }
        }
        for (int t = 0; t < T; ++t) {
            for (int o = 0; o < D; ++o) {
                double s = get1(lp.bo, o);
                for (int i = 0; i < D; ++i) s += ctx[t][i] * get(lp.wo, i, o);
                x[t][o] += s;
            }
        }

        // MLP sublayer
        const int M = static_cast<int>(params.config.mlp_hidden);
        for (int t = 0; t < T; ++t) {
            std::vector<double> normed2 = layer_norm(x[t], lp.ln2_scale, lp.ln2_bias);
            std::vector<double> hidden(M);
            for (int o = 0; o < M; ++o) {
                double s = get1(lp.mlp_b1, o);
                for (int i = 0; i < D; ++i) s += normed2[i] * get(lp.mlp_w1, i, o);
                hidden[o] = gelu(s);
            }
            for (int o = 0; o < D; ++o) {
                double s = get1(lp.mlp_b2, o);
                for (int i = 0; i < M; ++i) s += hidden[i] * get(lp.mlp_w2, i, o);
                x[t][o] += s;
            }
        }
    }

    std::vector<double> cls = layer_norm(x[0], params.head_ln_scale, params.head_ln_bias);
    std::vector<double> logits(2);
    for (int o = 0; o < 2; ++o) {
        double s = get1(params.head_b, o);
        for (int i = 0; i < D; ++i) s += cls[i] * get(params.head_w, i, o);
        logits[o] = s;
    }
    return logits;
}

} // namespace testutil
