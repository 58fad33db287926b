#pragma once

#include "pdenet/schemes.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdenet {

enum class Architecture { ResNet, SymResNet, DFNet, FSINet };
enum class Sharing { Shared, TimeDynamic };
enum class StabilityMode { SpectralExact, GershgorinAPriori };

Architecture parse_architecture(const std::string& name); // resnet|symresnet|dfnet|fsinet
std::string architecture_name(Architecture arch);

/// Per-block trainable parameters.
///
/// Symmetric variants carry exactly one kernel bank; the outer convolution is
/// its negated adjoint. The standard ResNet trains an independent outer bank
/// plus per-channel biases, and folds the step size into the outer weights.
struct BlockParams {
    KernelBank kernel;
    std::optional<KernelBank> outer_kernel; // ResNet only
    std::vector<double> bias_in;            // ResNet only, size C
    std::vector<double> bias_out;           // ResNet only, size C
    double lambda = 15.0;
    double tau = 1.0;   // SymResNet / DFNet / FSINet
    double alpha = 1.0; // DFNet
};

struct NetworkSpec {
    Architecture arch = Architecture::SymResNet;
    int blocks = 1;
    int channels = 1;
    Sharing sharing = Sharing::Shared;
    FluxKind flux = FluxKind::PeronaMalik;
    StabilityMode stability = StabilityMode::SpectralExact;
};

/// Parameters of a whole network: one BlockParams when Shared, one per block
/// when TimeDynamic. FSI extrapolation weights are per block even when the
/// convolution weights are shared; blocks 2..B use fsi_alphas[b-2] and the
/// first block always runs as a plain explicit block.
struct NetworkParams {
    std::vector<BlockParams> blocks;
    std::vector<double> fsi_alphas; // FSINet: size spec.blocks - 1
};

/// Everything the reverse pass needs to reproduce one block application.
struct BlockTrace {
    SignalBundle input;      // state entering the block
    SignalBundle pre;        // inner convolution output (+ bias for ResNet)
    SignalBundle activated;  // flux of pre
    SignalBundle conv_out;   // outer convolution output
};

struct ForwardTape {
    SignalBundle lifted;            // network input after channel lifting
    std::vector<BlockTrace> blocks; // one per block
    SignalBundle final_state;       // last block output before channel averaging
};

/// Index of the BlockParams slot driving block b (0-based).
inline int param_index(const NetworkSpec& spec, int block) {
    return spec.sharing == Sharing::Shared ? 0 : block;
}

/// Throws ConfigError when params do not fit the spec.
void validate_params(const NetworkSpec& spec, const NetworkParams& params);

/// Fresh parameter set with the catalog defaults (identity-free zero kernels;
/// callers initialise taps).
NetworkParams make_params(const NetworkSpec& spec);

/// One diffusion block u - tau K^T Phi(K u); identical to explicit_step and
/// additionally records the tape fragment when trace != nullptr.
SignalBundle diffusion_block_forward(const SignalBundle& u, const BlockParams& p,
                                     const FluxFunction& f, BlockTrace* trace = nullptr);

/// Standard residual block u + W2 Phi(W1 u + b1) + b2 (outer activation = Id).
SignalBundle standard_resblock_forward(const SignalBundle& u, const BlockParams& p,
                                       const FluxFunction& f, BlockTrace* trace = nullptr);

/// Full forward pass: lift the single-channel input into spec.channels
/// channels, chain the blocks (DF/FSI keep a two-level state, their first
/// block is a plain explicit block), average the channels.
SignalBundle network_forward(const NetworkSpec& spec, const NetworkParams& params,
                             const SignalBundle& u0, ForwardTape* tape = nullptr);

/// Number of trainable scalars (kernels, biases, lambda where the flux has
/// one, tau for the symmetric variants, alpha for DF, FSI weights).
long count_parameters(const NetworkSpec& spec, const NetworkParams& params);

/// Flat text model file (key = value, decimal-17, bit-exact round trip).
void save_model(const std::string& path, const NetworkSpec& spec, const NetworkParams& params);
struct LoadedModel {
    NetworkSpec spec;
    NetworkParams params;
};
LoadedModel load_model(const std::string& path);

} // namespace pdenet
