#pragma once

#include <cmath>
#include <cstdint>

namespace decof {

inline constexpr double kLayerNormEps = 1e-5;

// y = x @ W + b, x: [rows, in], W: [in, out] row-major, b: [out] (may be null).
template <typename T>
void linear_forward(const T* x, int64_t rows, int64_t in, int64_t out,
                    const T* w, const T* b, T* y) {
    for (int64_t r = 0; r < rows; ++r) {
        T* yr = y + r * out;
        if (b) {
            for (int64_t o = 0; o < out; ++o) yr[o] = b[o];
        } else {
            for (int64_t o = 0; o < out; ++o) yr[o] = T(0);
        }
        const T* xr = x + r * in;
        for (int64_t i = 0; i < in; ++i) {
            const T xi = xr[i];
            const T* wi = w + i * out;
            for (int64_t o = 0; o < out; ++o) yr[o] += xi * wi[o];
        }
    }
}

// Per-row layernorm. mean/rstd/xhat outputs are optional caches for backward.
template <typename T>
void layer_norm_forward(const T* x, int64_t rows, int64_t d,
                        const T* scale, const T* bias, T* y,
                        T* mean_out = nullptr, T* rstd_out = nullptr, T* xhat_out = nullptr) {
    for (int64_t r = 0; r < rows; ++r) {
        const T* xr = x + r * d;
        T mean = T(0);
        for (int64_t i = 0; i < d; ++i) mean += xr[i];
        mean /= static_cast<T>(d);
        T var = T(0);
        for (int64_t i = 0; i < d; ++i) {
            const T dv = xr[i] - mean;
            var += dv * dv;
        }
        var /= static_cast<T>(d);
        const T rstd = T(1) / std::sqrt(var + static_cast<T>(kLayerNormEps));
        T* yr = y + r * d;
        for (int64_t i = 0; i < d; ++i) {
            const T xhat = (xr[i] - mean) * rstd;
            if (xhat_out) xhat_out[r * d + i] = xhat;
            yr[i] = xhat * scale[i] + bias[i];
        }
        if (mean_out) mean_out[r] = mean;
        if (rstd_out) rstd_out[r] = rstd;
    }
}

// In-place stable softmax over one row.
template <typename T>
void softmax_row(T* row, int64_t n) {
    T mx = row[0];
    for (int64_t i = 1; i < n; ++i) mx = row[i] > mx ? row[i] : mx;
    T sum = T(0);
    for (int64_t i = 0; i < n; ++i) {
        row[i] = std::exp(row[i] - mx);
        sum += row[i];
    }
    const T inv = T(1) / sum;
    for (int64_t i = 0; i < n; ++i) row[i] *= inv;
}

// Exact (erf-based) GELU and its derivative.
template <typename T>
T gelu(T x) {
    return T(0.5) * x * (T(1) + std::erf(x * static_cast<T>(0.7071067811865475244)));
}

template <typename T>
T gelu_grad(T x) {
    const T phi_cdf = T(0.5) * (T(1) + std::erf(x * static_cast<T>(0.7071067811865475244)));
    const T phi_pdf = std::exp(T(-0.5) * x * x) * static_cast<T>(0.3989422804014326779);
    return phi_cdf + x * phi_pdf;
}

} // namespace decof
