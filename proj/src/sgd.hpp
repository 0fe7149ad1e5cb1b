#pragma once

#include "verifier.hpp"

namespace decof {

// Classic momentum, no dampening, no weight decay:
//   v' = momentum * v + g;  p' = p - lr * v'
// Mutates params and velocity in place; trees must be shape-congruent.
void sgd_momentum_step(VerifierParams& params, const Gradients& grads, VerifierParams& velocity,
                       float lr, float momentum);

} // namespace decof
