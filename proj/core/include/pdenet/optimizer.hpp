#pragma once

#include "pdenet/gradients.hpp"

namespace pdenet {

/// Adam state over the flat parameter layout.
struct AdamState {
    std::vector<double> m, v;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

AdamState make_adam_state(size_t parameter_count);

/// Standard Adam update with bias correction, applied in place to the flat
/// parameter vector.
void adam_step(std::vector<double>& params_flat, const std::vector<double>& grads_flat,
               AdamState& state, double lr);

/// Constraint projection applied after every optimizer step:
///  - tau clamped to (0, tau_max] (tau_max per stability mode at length n),
///  - DF alpha raised to alpha_min,
///  - FSI weights clamped to [0, 2],
///  - lambda kept >= 1e-4.
void project_constraints(const NetworkSpec& spec, NetworkParams& params, int n);

} // namespace pdenet
