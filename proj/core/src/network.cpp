#include "pdenet/network.hpp"
#include "pdenet/errors.hpp"

#include <cmath>

namespace pdenet {

Architecture parse_architecture(const std::string& name) {
    if (name == "resnet") return Architecture::ResNet;
    if (name == "symresnet") return Architecture::SymResNet;
    if (name == "dfnet") return Architecture::DFNet;
    if (name == "fsinet") return Architecture::FSINet;
    throw ConfigError("unknown architecture '" + name + "' (expected resnet|symresnet|dfnet|fsinet)");
}

std::string architecture_name(Architecture arch) {
    switch (arch) {
        case Architecture::ResNet: return "resnet";
        case Architecture::SymResNet: return "symresnet";
        case Architecture::DFNet: return "dfnet";
        case Architecture::FSINet: return "fsinet";
    }
    return "symresnet";
}

void validate_params(const NetworkSpec& spec, const NetworkParams& params) {
    if (spec.blocks < 1) throw ConfigError("network spec: blocks must be >= 1");
    if (spec.channels < 1) throw ConfigError("network spec: channels must be >= 1");
    const size_t expected =
        spec.sharing == Sharing::Shared ? 1 : static_cast<size_t>(spec.blocks);
    if (params.blocks.size() != expected)
        throw ConfigError("network params: expected " + std::to_string(expected) +
                          " block parameter sets, got " + std::to_string(params.blocks.size()));
    for (const auto& b : params.blocks) {
        if (b.kernel.out_channels() != spec.channels || b.kernel.in_channels() != spec.channels)
            throw ConfigError("network params: kernel bank does not match channel count");
        if (spec.arch == Architecture::ResNet) {
            if (!b.outer_kernel)
                throw ConfigError("network params: standard ResNet blocks need an outer kernel");
            if (b.outer_kernel->out_channels() != spec.channels ||
                b.outer_kernel->in_channels() != spec.channels)
                throw ConfigError("network params: outer kernel does not match channel count");
            if (static_cast<int>(b.bias_in.size()) != spec.channels ||
                static_cast<int>(b.bias_out.size()) != spec.channels)
                throw ConfigError("network params: bias vectors must have one entry per channel");
        }
    }
    if (spec.arch == Architecture::FSINet) {
        if (static_cast<int>(params.fsi_alphas.size()) != spec.blocks - 1)
            throw ConfigError("network params: FSI networks need blocks-1 extrapolation weights");
    } else if (!params.fsi_alphas.empty()) {
        throw ConfigError("network params: fsi_alphas only apply to FSI networks");
    }
}

NetworkParams make_params(const NetworkSpec& spec) {
    NetworkParams p;
    const int sets = spec.sharing == Sharing::Shared ? 1 : spec.blocks;
    for (int i = 0; i < sets; ++i) {
        BlockParams b;
        b.kernel = KernelBank(spec.channels, spec.channels);
        if (spec.arch == Architecture::ResNet) {
            b.outer_kernel = KernelBank(spec.channels, spec.channels);
            b.bias_in.assign(spec.channels, 0.0);
            b.bias_out.assign(spec.channels, 0.0);
        }
        p.blocks.push_back(std::move(b));
    }
    if (spec.arch == Architecture::FSINet) p.fsi_alphas.assign(std::max(spec.blocks - 1, 0), 1.0);
    return p;
}

namespace {

// Shared core of all symmetric blocks: out = u - sigma K^T Phi(K u).
SignalBundle symmetric_core(const SignalBundle& u, const KernelBank& k, const FluxFunction& f,
                            double sigma, BlockTrace* trace) {
    SignalBundle pre = conv_apply(u, k);
    SignalBundle activated = pre;
    apply_flux_inplace(activated, f);
    SignalBundle conv_out = conv_adjoint_apply(activated, k);
    SignalBundle out = u;
    for (size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= sigma * conv_out.data()[i];
    if (trace) {
        trace->input = u;
        trace->pre = std::move(pre);
        trace->activated = std::move(activated);
        trace->conv_out = std::move(conv_out);
    }
    return out;
}

} // namespace

SignalBundle diffusion_block_forward(const SignalBundle& u, const BlockParams& p,
                                     const FluxFunction& f, BlockTrace* trace) {
    SignalBundle out = symmetric_core(u, p.kernel, f, p.tau, trace);
    out.require_finite("diffusion_block_forward");
    return out;
}

SignalBundle standard_resblock_forward(const SignalBundle& u, const BlockParams& p,
                                       const FluxFunction& f, BlockTrace* trace) {
    if (!p.outer_kernel) throw ConfigError("standard_resblock_forward: missing outer kernel");
    SignalBundle pre = conv_apply(u, p.kernel);
    for (int c = 0; c < pre.channels(); ++c) {
        const double b1 = p.bias_in.empty() ? 0.0 : p.bias_in[c];
        for (auto& v : pre.channel(c)) v += b1;
    }
    SignalBundle activated = pre;
    apply_flux_inplace(activated, f);
    SignalBundle conv_out = conv_apply(activated, *p.outer_kernel);
    SignalBundle out = u;
    for (int c = 0; c < out.channels(); ++c) {
        const double b2 = p.bias_out.empty() ? 0.0 : p.bias_out[c];
        auto dst = out.channel(c);
        auto add = conv_out.channel(c);
        for (int i = 0; i < out.length(); ++i) dst[i] += add[i] + b2;
    }
    if (trace) {
        trace->input = u;
        trace->pre = std::move(pre);
        trace->activated = std::move(activated);
        trace->conv_out = std::move(conv_out);
    }
    out.require_finite("standard_resblock_forward");
    return out;
}

SignalBundle network_forward(const NetworkSpec& spec, const NetworkParams& params,
                             const SignalBundle& u0, ForwardTape* tape) {
    validate_params(spec, params);
    if (u0.channels() != 1)
        throw ConfigError("network_forward: expects a single-channel input signal");

    SignalBundle state = spec.channels == 1 ? u0 : lift_channels(u0, spec.channels);
    if (tape) {
        tape->lifted = state;
        tape->blocks.clear();
        tape->blocks.resize(spec.blocks);
    }
    SignalBundle previous = state; // state one block earlier (DF/FSI extrapolation)

    for (int b = 0; b < spec.blocks; ++b) {
        const BlockParams& p = params.blocks[param_index(spec, b)];
        const FluxFunction f{spec.flux, p.lambda};
        BlockTrace* trace = tape ? &tape->blocks[b] : nullptr;
        SignalBundle next;
        switch (spec.arch) {
            case Architecture::ResNet:
                next = standard_resblock_forward(state, p, f, trace);
                break;
            case Architecture::SymResNet:
                next = diffusion_block_forward(state, p, f, trace);
                break;
            case Architecture::DFNet: {
                if (b == 0) {
                    next = diffusion_block_forward(state, p, f, trace);
                } else {
                    const double denom = 1.0 + 2.0 * p.tau * p.alpha;
                    const double w_new = 4.0 * p.tau * p.alpha / denom;
                    const double w_old = (1.0 - 2.0 * p.tau * p.alpha) / denom;
                    SignalBundle diffused =
                        symmetric_core(state, p.kernel, f, 1.0 / (2.0 * p.alpha), trace);
                    next = state;
                    for (size_t i = 0; i < next.data().size(); ++i)
                        next.data()[i] =
                            w_new * diffused.data()[i] + w_old * previous.data()[i];
                    next.require_finite("network_forward(dfnet)");
                }
                break;
            }
            case Architecture::FSINet: {
                if (b == 0) {
                    next = diffusion_block_forward(state, p, f, trace);
                } else {
                    const double a = params.fsi_alphas[b - 1];
                    SignalBundle diffused = symmetric_core(state, p.kernel, f, p.tau, trace);
                    next = state;
                    for (size_t i = 0; i < next.data().size(); ++i)
                        next.data()[i] = a * diffused.data()[i] + (1.0 - a) * previous.data()[i];
                    next.require_finite("network_forward(fsinet)");
                }
                break;
            }
        }
        previous = std::move(state);
        state = std::move(next);
    }

    if (tape) tape->final_state = state;
    return spec.channels == 1 ? state : average_channels(state);
}

long count_parameters(const NetworkSpec& spec, const NetworkParams& params) {
    validate_params(spec, params);
    const long c = spec.channels;
    const long per_kernel = 3 * c * c;
    long per_block = per_kernel;
    if (spec.arch == Architecture::ResNet) per_block += per_kernel + 2 * c;
    if (flux_has_lambda(spec.flux)) per_block += 1;
    if (spec.arch != Architecture::ResNet) per_block += 1; // tau
    if (spec.arch == Architecture::DFNet) per_block += 1;  // alpha
    long total = per_block * static_cast<long>(params.blocks.size());
    if (spec.arch == Architecture::FSINet) total += static_cast<long>(params.fsi_alphas.size());
    return total;
}

} // namespace pdenet
