#pragma once

#include "verifier.hpp"

namespace decof {

// Central-difference gradient of the cross-entropy loss w.r.t. every
// parameter, evaluated in double precision with dropout disabled. Testing
// oracle for the analytic backward pass; O(param_count) forward pairs, so use
// small configs only.
Gradients64 finite_difference_grad(const VerifierParams& params, const Tensor& features,
                                   int label, double h);

// Loss at the given parameters, double precision, eval mode.
double loss_at(const VerifierParamsT<double>& params, const Tensor64& features, int label);

} // namespace decof
