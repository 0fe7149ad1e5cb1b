#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rng.hpp"
#include "tensor.hpp"
#include "verifier.hpp"

namespace testutil {

// Relative error with a floor so coordinates near zero are judged on the
// absolute scale the finite-difference oracle can actually resolve.
inline double rel_err(double a, double b, double floor = 1e-3) {
    const double denom = std::max({std::fabs(a), std::fabs(b), floor});
    return std::fabs(a - b) / denom;
}

inline decof::Tensor random_features(int64_t l, int64_t d, uint64_t seed, double scale = 1.0) {
    decof::Rng rng(seed);
    decof::Tensor t({l, d});
    for (auto& v : t.data) v = static_cast<float>(rng.normal() * scale);
    return t;
}

// Fills every tensor (including biases and the head) with noise so gradient
// checks exercise all paths; layernorm scales stay near 1 for conditioning.
inline void randomize_all(decof::VerifierParams& params, uint64_t seed, double scale = 0.2) {
    decof::Rng rng(seed);
    params.for_each([&](const std::string& name, decof::Tensor& t) {
        const bool ln_scale = name.ends_with("scale");
        for (auto& v : t.data) {
            const double n = rng.normal();
            v = ln_scale ? static_cast<float>(1.0 + 0.1 * n) : static_cast<float>(n * scale);
        }
    });
}

struct GradCompare {
    double max_rel = 0.0;
    std::string worst;
};

template <typename A, typename B>
GradCompare compare_grads(const decof::VerifierParamsT<A>& a, const decof::VerifierParamsT<B>& b) {
    std::vector<std::pair<std::string, const decof::Tens<A>*>> at;
    a.for_each([&](const std::string& n, const decof::Tens<A>& t) { at.emplace_back(n, &t); });
    std::vector<const decof::Tens<B>*> bt;
    b.for_each([&](const std::string&, const decof::Tens<B>& t) { bt.push_back(&t); });
    GradCompare out;
    for (size_t i = 0; i < at.size(); ++i) {
        for (size_t k = 0; k < at[i].second->data.size(); ++k) {
            const double r = rel_err(static_cast<double>(at[i].second->data[k]),
                                     static_cast<double>(bt[i]->data[k]));
            if (r > out.max_rel) {
                out.max_rel = r;
                out.worst = at[i].first + "[" + std::to_string(k) + "]";
            }
        }
    }
    return out;
}

} // namespace testutil
