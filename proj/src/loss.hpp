#pragma once

#include "tensor.hpp"

namespace decof {

template <typename T>
struct CrossEntropyResult {
    double loss = 0.0;
    Tens<T> dlogits; // softmax(logits) - target distribution
};

// Binary cross entropy over 2 logits, max-subtracted so large margins cannot
// overflow. label_smoothing > 0 spreads the target mass as (1-s/2, s/2).
template <typename T>
CrossEntropyResult<T> softmax_cross_entropy(const Tens<T>& logits, int label,
                                            double label_smoothing = 0.0);

} // namespace decof
