#include "verifier.hpp"

#include <cmath>

#include "nn_ops.hpp"
#include "rng.hpp"

namespace decof {

void VerifierConfig::validate() const {
    if (seq_len < 1) throw config_error("seq_len must be >= 1");
    if (width < 1) throw config_error("width must be >= 1");
    if (layers < 1) throw config_error("layers must be >= 1");
    if (heads < 1) throw config_error("heads must be >= 1");
    if (width % heads != 0)
        throw config_error("width " + std::to_string(width) + " not divisible by heads " +
                           std::to_string(heads));
    if (mlp_hidden < 1) throw config_error("mlp_hidden must be >= 1");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw config_error("dropout must be in [0,1)");
    if (head_hidden < 0) throw config_error("head_hidden must be >= 0");
}

namespace {

template <typename T, typename Fn>
void walk_params(VerifierParamsT<T>& p, Fn&& fn) {
    fn("class_embedding", p.class_embedding);
    fn("positional_embedding", p.positional_embedding);
    for (size_t l = 0; l < p.layers.size(); ++l) {
        const std::string base = "layers." + std::to_string(l) + ".";
        auto& lp = p.layers[l];
        fn(base + "ln1.scale", lp.ln1_scale);
        fn(base + "ln1.bias", lp.ln1_bias);
        fn(base + "attn.wq", lp.wq);
        fn(base + "attn.bq", lp.bq);
        fn(base + "attn.wk", lp.wk);
        fn(base + "attn.bk", lp.bk);
        fn(base + "attn.wv", lp.wv);
        fn(base + "attn.bv", lp.bv);
        fn(base + "attn.wo", lp.wo);
        fn(base + "attn.bo", lp.bo);
        fn(base + "ln2.scale", lp.ln2_scale);
        fn(base + "ln2.bias", lp.ln2_bias);
        fn(base + "mlp.w1", lp.mlp_w1);
        fn(base + "mlp.b1", lp.mlp_b1);
        fn(base + "mlp.w2", lp.mlp_w2);
        fn(base + "mlp.b2", lp.mlp_b2);
    }
    fn("head.ln.scale", p.head_ln_scale);
    fn("head.ln.bias", p.head_ln_bias);
    if (p.config.head_hidden > 0) {
        fn("head.hidden.w", p.head_hidden_w);
        fn("head.hidden.b", p.head_hidden_b);
    }
    fn("head.w", p.head_w);
    fn("head.b", p.head_b);
}

// dW += X^T @ dY, X: [rows, in], dY: [rows, out]
template <typename T>
void accum_weight_grad(const T* x, const T* dy, int64_t rows, int64_t in, int64_t out, T* dw) {
    for (int64_t r = 0; r < rows; ++r) {
        const T* xr = x + r * in;
        const T* dyr = dy + r * out;
        for (int64_t i = 0; i < in; ++i) {
            const T xi = xr[i];
            T* dwi = dw + i * out;
            for (int64_t o = 0; o < out; ++o) dwi[o] += xi * dyr[o];
        }
    }
}

// db += column sums of dY
template <typename T>
void accum_bias_grad(const T* dy, int64_t rows, int64_t out, T* db) {
    for (int64_t r = 0; r < rows; ++r) {
        const T* dyr = dy + r * out;
        for (int64_t o = 0; o < out; ++o) db[o] += dyr[o];
    }
}

// dX = dY @ W^T (overwrites dx)
template <typename T>
void input_grad(const T* dy, const T* w, int64_t rows, int64_t in, int64_t out, T* dx) {
    for (int64_t r = 0; r < rows; ++r) {
        const T* dyr = dy + r * out;
        T* dxr = dx + r * in;
        for (int64_t i = 0; i < in; ++i) {
            const T* wi = w + i * out;
            T acc = T(0);
            for (int64_t o = 0; o < out; ++o) acc += dyr[o] * wi[o];
            dxr[i] = acc;
        }
    }
}

// Accumulates layernorm input gradient into dx; dscale/dbias accumulate too.
template <typename T>
void layer_norm_backward_rows(const T* dy, const T* xhat, const T* rstd, const T* scale,
                              int64_t rows, int64_t d, T* dx, T* dscale, T* dbias) {
    for (int64_t r = 0; r < rows; ++r) {
        const T* dyr = dy + r * d;
        const T* xr = xhat + r * d;
        T sum_dxhat = T(0), sum_dxhat_xhat = T(0);
        for (int64_t i = 0; i < d; ++i) {
            const T dxhat = dyr[i] * scale[i];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xr[i];
            dscale[i] += dyr[i] * xr[i];
            dbias[i] += dyr[i];
        }
        const T inv_d = T(1) / static_cast<T>(d);
        const T m1 = sum_dxhat * inv_d;
        const T m2 = sum_dxhat_xhat * inv_d;
        T* dxr = dx + r * d;
        for (int64_t i = 0; i < d; ++i) {
            const T dxhat = dyr[i] * scale[i];
            dxr[i] += rstd[r] * (dxhat - m1 - xr[i] * m2);
        }
    }
}

template <typename T>
Tens<T> draw_dropout_mask(Rng& rng, std::vector<int64_t> shape, double p) {
    Tens<T> mask(std::move(shape));
    const T keep_scale = static_cast<T>(1.0 / (1.0 - p));
    for (auto& m : mask.data) m = rng.bernoulli(p) ? T(0) : keep_scale;
    return mask;
}

} // namespace

template <typename T>
void VerifierParamsT<T>::for_each(const std::function<void(const std::string&, Tens<T>&)>& fn) {
    walk_params(*this, fn);
}

template <typename T>
void VerifierParamsT<T>::for_each(
    const std::function<void(const std::string&, const Tens<T>&)>& fn) const {
    walk_params(const_cast<VerifierParamsT<T>&>(*this),
                [&](const std::string& name, Tens<T>& t) { fn(name, t); });
}

template <typename T>
int64_t VerifierParamsT<T>::param_count() const {
    int64_t n = 0;
    for_each([&](const std::string&, const Tens<T>& t) { n += t.numel(); });
    return n;
}

template <typename T>
bool VerifierParamsT<T>::all_finite() const {
    bool ok = true;
    for_each([&](const std::string&, const Tens<T>& t) { ok = ok && t.all_finite(); });
    return ok;
}

template <typename T>
VerifierParamsT<T> make_param_tree(const VerifierConfig& config) {
    config.validate();
    const int64_t d = config.width;
    const int64_t m = config.mlp_hidden;
    const int64_t h = config.head_hidden;
    VerifierParamsT<T> p;
    p.config = config;
    p.class_embedding = Tens<T>({d});
    p.positional_embedding = Tens<T>({config.seq_len + 1, d});
    p.layers.resize(static_cast<size_t>(config.layers));
    for (auto& lp : p.layers) {
        lp.ln1_scale = Tens<T>({d});
        lp.ln1_bias = Tens<T>({d});
        lp.wq = Tens<T>({d, d});
        lp.bq = Tens<T>({d});
        lp.wk = Tens<T>({d, d});
        lp.bk = Tens<T>({d});
        lp.wv = Tens<T>({d, d});
        lp.bv = Tens<T>({d});
        lp.wo = Tens<T>({d, d});
        lp.bo = Tens<T>({d});
        lp.ln2_scale = Tens<T>({d});
        lp.ln2_bias = Tens<T>({d});
        lp.mlp_w1 = Tens<T>({d, m});
        lp.mlp_b1 = Tens<T>({m});
        lp.mlp_w2 = Tens<T>({m, d});
        lp.mlp_b2 = Tens<T>({d});
    }
    p.head_ln_scale = Tens<T>({d});
    p.head_ln_bias = Tens<T>({d});
    if (h > 0) {
        p.head_hidden_w = Tens<T>({d, h});
        p.head_hidden_b = Tens<T>({h});
        p.head_w = Tens<T>({h, 2});
    } else {
        p.head_w = Tens<T>({d, 2});
    }
    p.head_b = Tens<T>({2});
    return p;
}

VerifierParams init_params(const VerifierConfig& config, uint64_t seed) {
    VerifierParams p = make_param_tree<float>(config);
    Rng rng(seed);
    p.for_each([&](const std::string& name, Tensor& t) {
        if (name.ends_with("ln.scale") || name.ends_with("ln1.scale") || name.ends_with("ln2.scale")) {
            for (auto& v : t.data) v = 1.0f;
            return;
        }
        // every bias stays zero and so does the final head linear
        const bool zero = name.ends_with(".bias") || name == "head.w" || name == "head.b" ||
                          name.ends_with(".bq") || name.ends_with(".bk") ||
                          name.ends_with(".bv") || name.ends_with(".bo") ||
                          name.ends_with(".b1") || name.ends_with(".b2") ||
                          name.ends_with("hidden.b");
        if (zero) return;
        for (auto& v : t.data) v = static_cast<float>(rng.normal() * 0.02);
    });
    return p;
}

template <typename T>
VerifierParamsT<T> zeros_like(const VerifierParamsT<T>& like) {
    return make_param_tree<T>(like.config);
}

template <typename T>
VerifierParamsT<T> cast_params(const VerifierParams& params) {
    VerifierParamsT<T> out = make_param_tree<T>(params.config);
    std::vector<Tens<T>*> dst;
    out.for_each([&](const std::string&, Tens<T>& t) { dst.push_back(&t); });
    size_t i = 0;
    params.for_each([&](const std::string&, const Tensor& t) {
        dst[i]->data.assign(t.data.begin(), t.data.end());
        ++i;
    });
    return out;
}

template <typename T>
ForwardTraceT<T> verifier_forward(const Tens<T>& features, const VerifierParamsT<T>& params,
                                  bool training, uint64_t seed) {
    const VerifierConfig& cfg = params.config;
    if (features.shape.size() != 2 || features.dim(0) != cfg.seq_len || features.dim(1) != cfg.width)
        throw data_error("feature sequence shape " + shape_str(features.shape) +
                         " does not match verifier config [" + std::to_string(cfg.seq_len) + "," +
                         std::to_string(cfg.width) + "]");

    const int64_t len = cfg.seq_len + 1; // tokens including class position
    const int64_t d = cfg.width;
    const int64_t nh = cfg.heads;
    const int64_t dh = d / nh;
    const T att_scale = T(1) / std::sqrt(static_cast<T>(dh));
    const bool use_dropout = training && cfg.dropout > 0.0;

    Rng rng(seed);

    ForwardTraceT<T> trace;
    trace.config = cfg;
    trace.input = features;
    trace.rng_seed = seed;
    trace.training = training;
    trace.layers.resize(static_cast<size_t>(cfg.layers));

    // class token + frame features, plus the positional table
    Tens<T> x({len, d});
    for (int64_t i = 0; i < d; ++i)
        x.at(0, i) = params.class_embedding.data[static_cast<size_t>(i)] + params.positional_embedding.at(0, i);
    for (int64_t t = 0; t < cfg.seq_len; ++t)
        for (int64_t i = 0; i < d; ++i)
            x.at(t + 1, i) = features.at(t, i) + params.positional_embedding.at(t + 1, i);

    Tens<T> ln_out({len, d});
    for (int64_t l = 0; l < cfg.layers; ++l) {
        const auto& lp = params.layers[static_cast<size_t>(l)];
        auto& lt = trace.layers[static_cast<size_t>(l)];
        lt.x_in = x;
        lt.ln1_mean.resize(static_cast<size_t>(len));
        lt.ln1_rstd.resize(static_cast<size_t>(len));
        lt.xhat1 = Tens<T>({len, d});
        layer_norm_forward(x.ptr(), len, d, lp.ln1_scale.ptr(), lp.ln1_bias.ptr(), ln_out.ptr(),
                           lt.ln1_mean.data(), lt.ln1_rstd.data(), lt.xhat1.ptr());

        lt.q = Tens<T>({len, d});
        lt.k = Tens<T>({len, d});
        lt.v = Tens<T>({len, d});
        linear_forward(ln_out.ptr(), len, d, d, lp.wq.ptr(), lp.bq.ptr(), lt.q.ptr());
        linear_forward(ln_out.ptr(), len, d, d, lp.wk.ptr(), lp.bk.ptr(), lt.k.ptr());
        linear_forward(ln_out.ptr(), len, d, d, lp.wv.ptr(), lp.bv.ptr(), lt.v.ptr());

        lt.att = Tens<T>({nh, len, len});
        if (use_dropout) lt.att_mask = draw_dropout_mask<T>(rng, {nh, len, len}, cfg.dropout);
        lt.ctx = Tens<T>({len, d});
        for (int64_t h = 0; h < nh; ++h) {
            const int64_t off = h * dh;
            for (int64_t i = 0; i < len; ++i) {
                T* att_row = lt.att.ptr() + (h * len + i) * len;
                const T* qi = lt.q.ptr() + i * d + off;
                for (int64_t j = 0; j < len; ++j) {
                    const T* kj = lt.k.ptr() + j * d + off;
                    T s = T(0);
                    for (int64_t c = 0; c < dh; ++c) s += qi[c] * kj[c];
                    att_row[j] = s * att_scale;
                }
                softmax_row(att_row, len);
                T* ctx_row = lt.ctx.ptr() + i * d + off;
                for (int64_t c = 0; c < dh; ++c) ctx_row[c] = T(0);
                const T* mask_row =
                    use_dropout ? lt.att_mask.ptr() + (h * len + i) * len : nullptr;
                for (int64_t j = 0; j < len; ++j) {
                    const T p = mask_row ? att_row[j] * mask_row[j] : att_row[j];
                    const T* vj = lt.v.ptr() + j * d + off;
                    for (int64_t c = 0; c < dh; ++c) ctx_row[c] += p * vj[c];
                }
            }
        }

        Tens<T> attn_out({len, d});
        linear_forward(lt.ctx.ptr(), len, d, d, lp.wo.ptr(), lp.bo.ptr(), attn_out.ptr());
        lt.x_mid = Tens<T>({len, d});
        for (int64_t i = 0; i < len * d; ++i)
            lt.x_mid.data[static_cast<size_t>(i)] =
                x.data[static_cast<size_t>(i)] + attn_out.data[static_cast<size_t>(i)];

        lt.ln2_mean.resize(static_cast<size_t>(len));
        lt.ln2_rstd.resize(static_cast<size_t>(len));
        lt.xhat2 = Tens<T>({len, d});
        layer_norm_forward(lt.x_mid.ptr(), len, d, lp.ln2_scale.ptr(), lp.ln2_bias.ptr(),
                           ln_out.ptr(), lt.ln2_mean.data(), lt.ln2_rstd.data(), lt.xhat2.ptr());

        const int64_t m = cfg.mlp_hidden;
        lt.z1 = Tens<T>({len, m});
        linear_forward(ln_out.ptr(), len, d, m, lp.mlp_w1.ptr(), lp.mlp_b1.ptr(), lt.z1.ptr());
        lt.a1 = Tens<T>({len, m});
        for (int64_t i = 0; i < len * m; ++i)
            lt.a1.data[static_cast<size_t>(i)] = gelu(lt.z1.data[static_cast<size_t>(i)]);

        Tens<T> mlp_out({len, d});
        linear_forward(lt.a1.ptr(), len, m, d, lp.mlp_w2.ptr(), lp.mlp_b2.ptr(), mlp_out.ptr());
        if (use_dropout) {
            lt.mlp_mask = draw_dropout_mask<T>(rng, {len, d}, cfg.dropout);
            for (int64_t i = 0; i < len * d; ++i)
                mlp_out.data[static_cast<size_t>(i)] *= lt.mlp_mask.data[static_cast<size_t>(i)];
        }
        for (int64_t i = 0; i < len * d; ++i)
            x.data[static_cast<size_t>(i)] =
                lt.x_mid.data[static_cast<size_t>(i)] + mlp_out.data[static_cast<size_t>(i)];
    }
    trace.x_final = x;

    // classification head reads the class position only
    trace.head_xhat = Tens<T>({d});
    Tens<T> head_ln_out({d});
    {
        T mean, rstd;
        layer_norm_forward(x.ptr(), 1, d, params.head_ln_scale.ptr(), params.head_ln_bias.ptr(),
                           head_ln_out.ptr(), &mean, &rstd, trace.head_xhat.ptr());
        trace.head_ln_mean = mean;
        trace.head_ln_rstd = rstd;
    }

    if (cfg.head_hidden > 0) {
        const int64_t hh = cfg.head_hidden;
        trace.head_hidden_z = Tens<T>({hh});
        linear_forward(head_ln_out.ptr(), 1, d, hh, params.head_hidden_w.ptr(),
                       params.head_hidden_b.ptr(), trace.head_hidden_z.ptr());
        trace.head_in = Tens<T>({hh});
        for (int64_t i = 0; i < hh; ++i)
            trace.head_in.data[static_cast<size_t>(i)] =
                gelu(trace.head_hidden_z.data[static_cast<size_t>(i)]);
    } else {
        trace.head_in = head_ln_out;
    }

    trace.logits = Tens<T>({2});
    linear_forward(trace.head_in.ptr(), 1, trace.head_in.dim(0), 2, params.head_w.ptr(),
                   params.head_b.ptr(), trace.logits.ptr());
    if (!trace.logits.all_finite()) throw runtime_error("verifier forward produced non-finite logits");
    return trace;
}

template <typename T>
VerifierParamsT<T> verifier_backward(const ForwardTraceT<T>& trace, const Tens<T>& dlogits,
                                     const VerifierParamsT<T>& params) {
    const VerifierConfig& cfg = params.config;
    if (!(trace.config == cfg))
        throw decof::runtime_error("forward trace config does not match parameters");
    if (dlogits.numel() != 2) throw decof::runtime_error("dlogits must have 2 entries");
    if (static_cast<int64_t>(trace.layers.size()) != cfg.layers)
        throw decof::runtime_error("forward trace layer count does not match parameters");

    const int64_t len = cfg.seq_len + 1;
    const int64_t d = cfg.width;
    const int64_t nh = cfg.heads;
    const int64_t dh = d / nh;
    const T att_scale = T(1) / std::sqrt(static_cast<T>(dh));
    const bool use_dropout = trace.training && cfg.dropout > 0.0;

    VerifierParamsT<T> g = make_param_tree<T>(cfg);

    // head linear
    const int64_t head_in_dim = trace.head_in.dim(0);
    accum_weight_grad(trace.head_in.ptr(), dlogits.ptr(), 1, head_in_dim, 2, g.head_w.ptr());
    accum_bias_grad(dlogits.ptr(), 1, 2, g.head_b.ptr());
    Tens<T> dhead_in({head_in_dim});
    input_grad(dlogits.ptr(), params.head_w.ptr(), 1, head_in_dim, 2, dhead_in.ptr());

    // optional hidden layer, then the head layernorm
    Tens<T> dhead_ln({d});
    if (cfg.head_hidden > 0) {
        const int64_t hh = cfg.head_hidden;
        Tens<T> dz({hh});
        for (int64_t i = 0; i < hh; ++i)
            dz.data[static_cast<size_t>(i)] = dhead_in.data[static_cast<size_t>(i)] *
                                              gelu_grad(trace.head_hidden_z.data[static_cast<size_t>(i)]);
        Tens<T> head_ln_out({d});
        for (int64_t i = 0; i < d; ++i)
            head_ln_out.data[static_cast<size_t>(i)] =
                trace.head_xhat.data[static_cast<size_t>(i)] * params.head_ln_scale.data[static_cast<size_t>(i)] +
                params.head_ln_bias.data[static_cast<size_t>(i)];
        accum_weight_grad(head_ln_out.ptr(), dz.ptr(), 1, d, hh, g.head_hidden_w.ptr());
        accum_bias_grad(dz.ptr(), 1, hh, g.head_hidden_b.ptr());
        input_grad(dz.ptr(), params.head_hidden_w.ptr(), 1, d, hh, dhead_ln.ptr());
    } else {
        dhead_ln = dhead_in;
    }

    Tens<T> dx({len, d}); // gradient w.r.t. x_final; only the class row is fed
    {
        const T rstd = trace.head_ln_rstd;
        layer_norm_backward_rows(dhead_ln.ptr(), trace.head_xhat.ptr(), &rstd,
                                 params.head_ln_scale.ptr(), 1, d, dx.ptr(),
                                 g.head_ln_scale.ptr(), g.head_ln_bias.ptr());
    }

    Tens<T> ln_out({len, d});
    Tens<T> dbuf({len, d});
    for (int64_t l = cfg.layers - 1; l >= 0; --l) {
        const auto& lp = params.layers[static_cast<size_t>(l)];
        const auto& lt = trace.layers[static_cast<size_t>(l)];
        const int64_t m = cfg.mlp_hidden;

        // MLP path: x_out = x_mid + dropout(W2 . gelu(W1 . ln2(x_mid)))
        Tens<T> dm({len, d});
        if (use_dropout) {
            for (int64_t i = 0; i < len * d; ++i)
                dm.data[static_cast<size_t>(i)] =
                    dx.data[static_cast<size_t>(i)] * lt.mlp_mask.data[static_cast<size_t>(i)];
        } else {
            dm = dx;
        }
        accum_weight_grad(lt.a1.ptr(), dm.ptr(), len, m, d, g.layers[static_cast<size_t>(l)].mlp_w2.ptr());
        accum_bias_grad(dm.ptr(), len, d, g.layers[static_cast<size_t>(l)].mlp_b2.ptr());
        Tens<T> da1({len, m});
        input_grad(dm.ptr(), lp.mlp_w2.ptr(), len, m, d, da1.ptr());
        for (int64_t i = 0; i < len * m; ++i)
            da1.data[static_cast<size_t>(i)] *= gelu_grad(lt.z1.data[static_cast<size_t>(i)]);

        // recompute ln2 output from the cached normalized values
        for (int64_t r = 0; r < len; ++r)
            for (int64_t i = 0; i < d; ++i)
                ln_out.at(r, i) = lt.xhat2.at(r, i) * lp.ln2_scale.data[static_cast<size_t>(i)] +
                                  lp.ln2_bias.data[static_cast<size_t>(i)];
        accum_weight_grad(ln_out.ptr(), da1.ptr(), len, d, m, g.layers[static_cast<size_t>(l)].mlp_w1.ptr());
        accum_bias_grad(da1.ptr(), len, m, g.layers[static_cast<size_t>(l)].mlp_b1.ptr());
        input_grad(da1.ptr(), lp.mlp_w1.ptr(), len, d, m, dbuf.ptr());

        layer_norm_backward_rows(dbuf.ptr(), lt.xhat2.ptr(), lt.ln2_rstd.data(), lp.ln2_scale.ptr(),
                                 len, d, dx.ptr(), g.layers[static_cast<size_t>(l)].ln2_scale.ptr(),
                                 g.layers[static_cast<size_t>(l)].ln2_bias.ptr());
        // dx now holds the gradient w.r.t. x_mid

        // attention path: x_mid = x_in + Wo . ctx
        accum_weight_grad(lt.ctx.ptr(), dx.ptr(), len, d, d, g.layers[static_cast<size_t>(l)].wo.ptr());
        accum_bias_grad(dx.ptr(), len, d, g.layers[static_cast<size_t>(l)].bo.ptr());
        Tens<T> dctx({len, d});
        input_grad(dx.ptr(), lp.wo.ptr(), len, d, d, dctx.ptr());

        Tens<T> dq({len, d});
        Tens<T> dk({len, d});
        Tens<T> dv({len, d});
        std::vector<T> datt(static_cast<size_t>(len));
        for (int64_t h = 0; h < nh; ++h) {
            const int64_t off = h * dh;
            for (int64_t i = 0; i < len; ++i) {
                const T* att_row = lt.att.ptr() + (h * len + i) * len;
                const T* mask_row =
                    use_dropout ? lt.att_mask.ptr() + (h * len + i) * len : nullptr;
                const T* dctx_row = dctx.ptr() + i * d + off;

                // d(att_drop) and dv
                T dot = T(0);
                for (int64_t j = 0; j < len; ++j) {
                    const T* vj = lt.v.ptr() + j * d + off;
                    T da = T(0);
                    for (int64_t c = 0; c < dh; ++c) da += dctx_row[c] * vj[c];
                    const T p = mask_row ? att_row[j] * mask_row[j] : att_row[j];
                    T* dvj = dv.ptr() + j * d + off;
                    for (int64_t c = 0; c < dh; ++c) dvj[c] += p * dctx_row[c];
                    if (mask_row) da *= mask_row[j];
                    datt[static_cast<size_t>(j)] = da;
                    dot += da * att_row[j];
                }
                // softmax backward, then scores to q/k
                T* dqi = dq.ptr() + i * d + off;
                for (int64_t j = 0; j < len; ++j) {
                    const T ds = att_row[j] * (datt[static_cast<size_t>(j)] - dot) * att_scale;
                    const T* kj = lt.k.ptr() + j * d + off;
                    const T* qi = lt.q.ptr() + i * d + off;
                    T* dkj = dk.ptr() + j * d + off;
                    for (int64_t c = 0; c < dh; ++c) {
                        dqi[c] += ds * kj[c];
                        dkj[c] += ds * qi[c];
                    }
                }
            }
        }

        // recompute ln1 output
        for (int64_t r = 0; r < len; ++r)
            for (int64_t i = 0; i < d; ++i)
                ln_out.at(r, i) = lt.xhat1.at(r, i) * lp.ln1_scale.data[static_cast<size_t>(i)] +
                                  lp.ln1_bias.data[static_cast<size_t>(i)];

        auto& gl = g.layers[static_cast<size_t>(l)];
        accum_weight_grad(ln_out.ptr(), dq.ptr(), len, d, d, gl.wq.ptr());
        accum_bias_grad(dq.ptr(), len, d, gl.bq.ptr());
        accum_weight_grad(ln_out.ptr(), dk.ptr(), len, d, d, gl.wk.ptr());
        accum_bias_grad(dk.ptr(), len, d, gl.bk.ptr());
        accum_weight_grad(ln_out.ptr(), dv.ptr(), len, d, d, gl.wv.ptr());
        accum_bias_grad(dv.ptr(), len, d, gl.bv.ptr());

        input_grad(dq.ptr(), lp.wq.ptr(), len, d, d, dbuf.ptr());
        Tens<T> tmp({len, d});
        input_grad(dk.ptr(), lp.wk.ptr(), len, d, d, tmp.ptr());
        for (int64_t i = 0; i < len * d; ++i)
            dbuf.data[static_cast<size_t>(i)] += tmp.data[static_cast<size_t>(i)];
        input_grad(dv.ptr(), lp.wv.ptr(), len, d, d, tmp.ptr());
        for (int64_t i = 0; i < len * d; ++i)
            dbuf.data[static_cast<size_t>(i)] += tmp.data[static_cast<size_t>(i)];

        layer_norm_backward_rows(dbuf.ptr(), lt.xhat1.ptr(), lt.ln1_rstd.data(), lp.ln1_scale.ptr(),
                                 len, d, dx.ptr(), gl.ln1_scale.ptr(), gl.ln1_bias.ptr());
        // dx now holds the gradient w.r.t. x_in of this layer
    }

    // x_in of layer 0 is class/positional embedding plus the features
    for (int64_t i = 0; i < d; ++i)
        g.class_embedding.data[static_cast<size_t>(i)] = dx.at(0, i);
    for (int64_t r = 0; r < len; ++r)
        for (int64_t i = 0; i < d; ++i)
            g.positional_embedding.at(r, i) = dx.at(r, i);
    return g;
}

float logits_to_score(float logit_real, float logit_generated) {
    const float mx = std::max(logit_real, logit_generated);
    const float e0 = std::exp(logit_real - mx);
    const float e1 = std::exp(logit_generated - mx);
    return e1 / (e0 + e1);
}

float predict_score(const Tensor& features, const VerifierParams& params) {
    ForwardTrace trace = verifier_forward(features, params, /*training=*/false, /*seed=*/0);
    return logits_to_score(trace.logits.data[0], trace.logits.data[1]);
}

template struct VerifierParamsT<float>;
template struct VerifierParamsT<double>;

template ForwardTraceT<float> verifier_forward<float>(const Tens<float>&, const VerifierParamsT<float>&, bool, uint64_t);
template ForwardTraceT<double> verifier_forward<double>(const Tens<double>&, const VerifierParamsT<double>&, bool, uint64_t);

template VerifierParamsT<float> verifier_backward<float>(const ForwardTraceT<float>&, const Tens<float>&, const VerifierParamsT<float>&);
template VerifierParamsT<double> verifier_backward<double>(const ForwardTraceT<double>&, const Tens<double>&, const VerifierParamsT<double>&);

template VerifierParamsT<float> zeros_like<float>(const VerifierParamsT<float>&);
template VerifierParamsT<double> zeros_like<double>(const VerifierParamsT<double>&);

template VerifierParamsT<float> cast_params<float>(const VerifierParams&);
template VerifierParamsT<double> cast_params<double>(const VerifierParams&);

} // namespace decof
