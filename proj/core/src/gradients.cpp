#include "pdenet/gradients.hpp"
#include "pdenet/errors.hpp"

#include <cmath>

namespace pdenet {

GradientSet make_gradients(const NetworkSpec& spec, const NetworkParams& params) {
    GradientSet g;
    g.blocks.resize(params.blocks.size());
    for (size_t i = 0; i < params.blocks.size(); ++i) {
        auto& b = g.blocks[i];
        b.kernel.assign(params.blocks[i].kernel.taps().size(), 0.0);
        if (spec.arch == Architecture::ResNet) {
            b.outer_kernel.assign(params.blocks[i].outer_kernel->taps().size(), 0.0);
            b.bias_in.assign(params.blocks[i].bias_in.size(), 0.0);
            b.bias_out.assign(params.blocks[i].bias_out.size(), 0.0);
        }
    }
    g.fsi_alphas.assign(params.fsi_alphas.size(), 0.0);
    return g;
}

void accumulate(GradientSet& into, const GradientSet& from) {
    for (size_t i = 0; i < into.blocks.size(); ++i) {
        auto& a = into.blocks[i];
        const auto& b = from.blocks[i];
        for (size_t j = 0; j < a.kernel.size(); ++j) a.kernel[j] += b.kernel[j];
        for (size_t j = 0; j < a.outer_kernel.size(); ++j) a.outer_kernel[j] += b.outer_kernel[j];
        for (size_t j = 0; j < a.bias_in.size(); ++j) a.bias_in[j] += b.bias_in[j];
        for (size_t j = 0; j < a.bias_out.size(); ++j) a.bias_out[j] += b.bias_out[j];
        a.lambda += b.lambda;
        a.tau += b.tau;
        a.alpha += b.alpha;
    }
    for (size_t j = 0; j < into.fsi_alphas.size(); ++j) into.fsi_alphas[j] += from.fsi_alphas[j];
}

void scale(GradientSet& grads, double factor) {
    for (auto& b : grads.blocks) {
        for (double& v : b.kernel) v *= factor;
        for (double& v : b.outer_kernel) v *= factor;
        for (double& v : b.bias_in) v *= factor;
        for (double& v : b.bias_out) v *= factor;
        b.lambda *= factor;
        b.tau *= factor;
        b.alpha *= factor;
    }
    for (double& v : grads.fsi_alphas) v *= factor;
}

namespace {

double dot(const SignalBundle& a, const SignalBundle& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

void add_taps(std::vector<double>& into, const std::vector<double>& taps) {
    for (size_t i = 0; i < into.size(); ++i) into[i] += taps[i];
}

// Reverse pass through the symmetric core out = x - sigma K^T Phi(K x).
// Accumulates kernel and lambda gradients (plus dL/dsigma when requested)
// and returns dL/dx.
SignalBundle symmetric_core_backward(const BlockTrace& trace, const KernelBank& kernel,
                                     const FluxFunction& f, double sigma,
                                     const SignalBundle& out_bar, BlockGrads& grads,
                                     double* sigma_bar) {
    if (sigma_bar) *sigma_bar += -dot(out_bar, trace.conv_out);

    SignalBundle conv_out_bar = out_bar;
    for (double& v : conv_out_bar.data()) v *= -sigma;

    SignalBundle activated_bar = conv_apply(conv_out_bar, kernel);
    add_taps(grads.kernel, conv_weight_grad(trace.activated, conv_out_bar));

    SignalBundle pre_bar = activated_bar;
    for (size_t i = 0; i < pre_bar.data().size(); ++i) {
        const double z = trace.pre.data()[i];
        pre_bar.data()[i] *= flux_derivative(f, z);
        grads.lambda += activated_bar.data()[i] * flux_lambda_derivative(f, z);
    }

    add_taps(grads.kernel, conv_weight_grad(pre_bar, trace.input));
    SignalBundle x_bar = conv_adjoint_apply(pre_bar, kernel);
    for (size_t i = 0; i < x_bar.data().size(); ++i) x_bar.data()[i] += out_bar.data()[i];
    return x_bar;
}

// Reverse pass through out = x + W2 Phi(W1 x + b1) + b2.
SignalBundle resblock_backward(const BlockTrace& trace, const BlockParams& p,
                               const FluxFunction& f, const SignalBundle& out_bar,
                               BlockGrads& grads) {
    for (int c = 0; c < out_bar.channels(); ++c) {
        double s = 0.0;
        for (double v : out_bar.channel(c)) s += v;
        grads.bias_out[c] += s;
    }
    add_taps(grads.outer_kernel, conv_weight_grad(out_bar, trace.activated));
    SignalBundle activated_bar = conv_adjoint_apply(out_bar, *p.outer_kernel);

    SignalBundle pre_bar = activated_bar;
    for (size_t i = 0; i < pre_bar.data().size(); ++i) {
        const double z = trace.pre.data()[i];
        pre_bar.data()[i] *= flux_derivative(f, z);
        grads.lambda += activated_bar.data()[i] * flux_lambda_derivative(f, z);
    }
    for (int c = 0; c < pre_bar.channels(); ++c) {
        double s = 0.0;
        for (double v : pre_bar.channel(c)) s += v;
        grads.bias_in[c] += s;
    }
    add_taps(grads.kernel, conv_weight_grad(pre_bar, trace.input));
    SignalBundle x_bar = conv_adjoint_apply(pre_bar, p.kernel);
    for (size_t i = 0; i < x_bar.data().size(); ++i) x_bar.data()[i] += out_bar.data()[i];
    return x_bar;
}

} // namespace

GradientSet backward(const NetworkSpec& spec, const NetworkParams& params,
                     const ForwardTape& tape, const SignalBundle& upstream) {
    validate_params(spec, params);
    if (static_cast<int>(tape.blocks.size()) != spec.blocks)
        throw ConfigError("backward: tape does not match the network spec");
    if (upstream.channels() != 1 || upstream.length() != tape.final_state.length())
        throw ConfigError("backward: upstream gradient has the wrong shape");

    GradientSet grads = make_gradients(spec, params);
    const int c = spec.channels;
    const int n = upstream.length();
    const bool two_level = spec.arch == Architecture::DFNet || spec.arch == Architecture::FSINet;

    // adjoint = dL/d v_b for the state entering the loop iteration;
    // pending  = skip-path contributions to the state one level further back.
    SignalBundle adjoint(c, n);
    for (int ch = 0; ch < c; ++ch)
        for (int i = 0; i < n; ++i) adjoint.at(ch, i) = upstream.at(0, i) / c;
    SignalBundle pending(c, n);

    for (int b = spec.blocks - 1; b >= 0; --b) {
        const BlockParams& p = params.blocks[param_index(spec, b)];
        BlockGrads& g = grads.blocks[param_index(spec, b)];
        const FluxFunction f{spec.flux, p.lambda};
        const BlockTrace& trace = tape.blocks[b];

        SignalBundle input_bar;
        SignalBundle skip(c, n);

        switch (spec.arch) {
            case Architecture::ResNet:
                input_bar = resblock_backward(trace, p, f, adjoint, g);
                break;
            case Architecture::SymResNet:
                input_bar = symmetric_core_backward(trace, p.kernel, f, p.tau, adjoint, g, &g.tau);
                break;
            case Architecture::DFNet: {
                if (b == 0) {
                    input_bar =
                        symmetric_core_backward(trace, p.kernel, f, p.tau, adjoint, g, &g.tau);
                    break;
                }
                const double ta = p.tau * p.alpha;
                const double denom = 1.0 + 2.0 * ta;
                const double w_new = 4.0 * ta / denom;
                const double w_old = (1.0 - 2.0 * ta) / denom;
                const double sigma = 1.0 / (2.0 * p.alpha);

                SignalBundle e = trace.input; // inner explicit result
                for (size_t i = 0; i < e.data().size(); ++i)
                    e.data()[i] -= sigma * trace.conv_out.data()[i];
                const SignalBundle& prev_state = tape.blocks[b - 1].input;

                const double d_e = dot(adjoint, e);
                const double d_prev = dot(adjoint, prev_state);
                g.tau += d_e * (4.0 * p.alpha / (denom * denom)) +
                         d_prev * (-4.0 * p.alpha / (denom * denom));
                g.alpha += d_e * (4.0 * p.tau / (denom * denom)) +
                           d_prev * (-4.0 * p.tau / (denom * denom));

                SignalBundle e_bar = adjoint;
                for (double& v : e_bar.data()) v *= w_new;
                double sigma_bar = 0.0;
                input_bar =
                    symmetric_core_backward(trace, p.kernel, f, sigma, e_bar, g, &sigma_bar);
                g.alpha += sigma_bar * (-1.0 / (2.0 * p.alpha * p.alpha));

                for (size_t i = 0; i < skip.data().size(); ++i)
                    skip.data()[i] = w_old * adjoint.data()[i];
                break;
            }
            case Architecture::FSINet: {
                if (b == 0) {
                    input_bar =
                        symmetric_core_backward(trace, p.kernel, f, p.tau, adjoint, g, &g.tau);
                    break;
                }
                const double a = params.fsi_alphas[b - 1];
                SignalBundle e = trace.input;
                for (size_t i = 0; i < e.data().size(); ++i)
                    e.data()[i] -= p.tau * trace.conv_out.data()[i];
                const SignalBundle& prev_state = tape.blocks[b - 1].input;

                grads.fsi_alphas[b - 1] += dot(adjoint, e) - dot(adjoint, prev_state);

                SignalBundle e_bar = adjoint;
                for (double& v : e_bar.data()) v *= a;
                input_bar = symmetric_core_backward(trace, p.kernel, f, p.tau, e_bar, g, &g.tau);

                for (size_t i = 0; i < skip.data().size(); ++i)
                    skip.data()[i] = (1.0 - a) * adjoint.data()[i];
                break;
            }
        }

        // dL/dv_{b-1} = through-block path + skips recorded by block b+1;
        // dL/dv_{b-2} contributions from this block wait one iteration.
        adjoint = std::move(input_bar);
        if (two_level) {
            for (size_t i = 0; i < adjoint.data().size(); ++i)
                adjoint.data()[i] += pending.data()[i];
            pending = std::move(skip);
        }
    }

    return grads;
}

std::vector<ParamSlot> parameter_layout(const NetworkSpec& spec, const NetworkParams& params) {
    std::vector<ParamSlot> layout;
    for (int b = 0; b < static_cast<int>(params.blocks.size()); ++b) {
        const auto& bp = params.blocks[b];
        for (int i = 0; i < static_cast<int>(bp.kernel.taps().size()); ++i)
            layout.push_back({b, ParamField::Kernel, i});
        if (spec.arch == Architecture::ResNet) {
            for (int i = 0; i < static_cast<int>(bp.outer_kernel->taps().size()); ++i)
                layout.push_back({b, ParamField::OuterKernel, i});
            for (int i = 0; i < static_cast<int>(bp.bias_in.size()); ++i)
                layout.push_back({b, ParamField::BiasIn, i});
            for (int i = 0; i < static_cast<int>(bp.bias_out.size()); ++i)
                layout.push_back({b, ParamField::BiasOut, i});
        }
        if (flux_has_lambda(spec.flux)) layout.push_back({b, ParamField::Lambda, 0});
        if (spec.arch != Architecture::ResNet) layout.push_back({b, ParamField::Tau, 0});
        if (spec.arch == Architecture::DFNet) layout.push_back({b, ParamField::Alpha, 0});
    }
    for (int i = 0; i < static_cast<int>(params.fsi_alphas.size()); ++i)
        layout.push_back({-1, ParamField::FsiAlpha, i});
    return layout;
}

double& param_ref(NetworkParams& params, const ParamSlot& slot) {
    if (slot.field == ParamField::FsiAlpha) return params.fsi_alphas[slot.offset];
    BlockParams& b = params.blocks[slot.block];
    switch (slot.field) {
        case ParamField::Kernel: return b.kernel.taps()[slot.offset];
        case ParamField::OuterKernel: return b.outer_kernel->taps()[slot.offset];
        case ParamField::BiasIn: return b.bias_in[slot.offset];
        case ParamField::BiasOut: return b.bias_out[slot.offset];
        case ParamField::Lambda: return b.lambda;
        case ParamField::Tau: return b.tau;
        case ParamField::Alpha: return b.alpha;
        case ParamField::FsiAlpha: break;
    }
    throw ConfigError("param_ref: bad slot");
}

double& grad_ref(GradientSet& grads, const ParamSlot& slot) {
    if (slot.field == ParamField::FsiAlpha) return grads.fsi_alphas[slot.offset];
    BlockGrads& b = grads.blocks[slot.block];
    switch (slot.field) {
        case ParamField::Kernel: return b.kernel[slot.offset];
        case ParamField::OuterKernel: return b.outer_kernel[slot.offset];
        case ParamField::BiasIn: return b.bias_in[slot.offset];
        case ParamField::BiasOut: return b.bias_out[slot.offset];
        case ParamField::Lambda: return b.lambda;
        case ParamField::Tau: return b.tau;
        case ParamField::Alpha: return b.alpha;
        case ParamField::FsiAlpha: break;
    }
    throw ConfigError("grad_ref: bad slot");
}

std::vector<double> flatten(const NetworkSpec& spec, const NetworkParams& params) {
    auto layout = parameter_layout(spec, params);
    std::vector<double> flat(layout.size());
    auto& mutable_params = const_cast<NetworkParams&>(params);
    for (size_t i = 0; i < layout.size(); ++i) flat[i] = param_ref(mutable_params, layout[i]);
    return flat;
}

void unflatten(const NetworkSpec& spec, std::vector<double> flat, NetworkParams& params) {
    auto layout = parameter_layout(spec, params);
    if (flat.size() != layout.size()) throw ConfigError("unflatten: size mismatch");
    for (size_t i = 0; i < layout.size(); ++i) param_ref(params, layout[i]) = flat[i];
}

std::vector<double> flatten(const NetworkSpec& spec, const NetworkParams& params,
                            const GradientSet& grads) {
    auto layout = parameter_layout(spec, params);
    std::vector<double> flat(layout.size());
    auto& mutable_grads = const_cast<GradientSet&>(grads);
    for (size_t i = 0; i < layout.size(); ++i) flat[i] = grad_ref(mutable_grads, layout[i]);
    return flat;
}

} // namespace pdenet
