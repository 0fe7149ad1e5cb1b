#include "loss.hpp"

#include <cmath>

namespace decof {

template <typename T>
CrossEntropyResult<T> softmax_cross_entropy(const Tens<T>& logits, int label,
                                            double label_smoothing) {
    if (logits.numel() != 2) throw data_error("expected 2 logits");
    if (label != 0 && label != 1) throw data_error("label must be 0 or 1");
    if (!logits.all_finite()) throw data_error("non-finite logits");

    const double l0 = static_cast<double>(logits.data[0]);
    const double l1 = static_cast<double>(logits.data[1]);
    const double mx = l0 > l1 ? l0 : l1;
    const double e0 = std::exp(l0 - mx);
    const double e1 = std::exp(l1 - mx);
    const double lse = mx + std::log(e0 + e1);
    const double p0 = e0 / (e0 + e1);
    const double p1 = e1 / (e0 + e1);

    double q[2] = {0.0, 0.0};
    q[label] = 1.0 - label_smoothing;
    q[0] += label_smoothing * 0.5;
    q[1] += label_smoothing * 0.5;

    CrossEntropyResult<T> out;
    out.loss = q[0] * (lse - l0) + q[1] * (lse - l1);
    out.dlogits = Tens<T>({2});
    out.dlogits.data[0] = static_cast<T>(p0 - q[0]);
    out.dlogits.data[1] = static_cast<T>(p1 - q[1]);
    return out;
}

template CrossEntropyResult<float> softmax_cross_entropy<float>(const Tens<float>&, int, double);
template CrossEntropyResult<double> softmax_cross_entropy<double>(const Tens<double>&, int, double);

} // namespace decof
