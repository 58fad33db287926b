#include "pdenet/optimizer.hpp"
#include "pdenet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pdenet {

AdamState make_adam_state(size_t parameter_count) {
    AdamState s;
    s.m.assign(parameter_count, 0.0);
    s.v.assign(parameter_count, 0.0);
    return s;
}

void adam_step(std::vector<double>& params_flat, const std::vector<double>& grads_flat,
               AdamState& state, double lr) {
    if (params_flat.size() != grads_flat.size() || params_flat.size() != state.m.size())
        throw ConfigError("adam_step: size mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < params_flat.size(); ++i) {
        const double g = grads_flat[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params_flat[i] -= lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

void project_constraints(const NetworkSpec& spec, NetworkParams& params, int n) {
    validate_params(spec, params);
    const FluxFunction flux{spec.flux, 1.0};
    const double lip = lipschitz_constant(flux);

    for (auto& b : params.blocks) {
        b.lambda = std::max(b.lambda, 1e-4);
        if (spec.arch == Architecture::ResNet) continue; // no numerical parameters

        double norm_sq;
        if (spec.stability == StabilityMode::GershgorinAPriori) {
            const double bound = apriori_norm_bound(b.kernel);
            norm_sq = bound * bound;
        } else {
            const double norm = spectral_norm(b.kernel, n);
            norm_sq = norm * norm;
        }
        if (norm_sq > 0.0) {
            const double tau_max = 2.0 / (lip * norm_sq);
            b.tau = std::clamp(b.tau, 0.0, tau_max);
            if (spec.arch == Architecture::DFNet)
                b.alpha = std::max(b.alpha, lip * norm_sq / 4.0);
        } else {
            b.tau = std::max(b.tau, 0.0);
            if (spec.arch == Architecture::DFNet) b.alpha = std::max(b.alpha, 1e-8);
        }
    }
    for (double& a : params.fsi_alphas) a = std::clamp(a, 0.0, 2.0);
}

} // namespace pdenet
