#pragma once

#include "pdenet/network.hpp"

namespace pdenet {

/// Gradient of one BlockParams set; layouts mirror the parameter layouts.
struct BlockGrads {
    std::vector<double> kernel;       // 3 C^2
    std::vector<double> outer_kernel; // ResNet only
    std::vector<double> bias_in;      // ResNet only
    std::vector<double> bias_out;     // ResNet only
    double lambda = 0.0;
    double tau = 0.0;
    double alpha = 0.0;
};

/// One entry per trainable scalar, mirroring NetworkParams.
struct GradientSet {
    std::vector<BlockGrads> blocks;
    std::vector<double> fsi_alphas;
};

GradientSet make_gradients(const NetworkSpec& spec, const NetworkParams& params);
void accumulate(GradientSet& into, const GradientSet& from);
void scale(GradientSet& grads, double factor);

/// Exact reverse-mode pass through a recorded forward tape.
/// `upstream` is dLoss/dOutput for the single-channel network output.
GradientSet backward(const NetworkSpec& spec, const NetworkParams& params,
                     const ForwardTape& tape, const SignalBundle& upstream);

/// Which trainable field a flat slot belongs to (temporal regulariser masks).
enum class ParamField { Kernel, OuterKernel, BiasIn, BiasOut, Lambda, Tau, Alpha, FsiAlpha };

/// Canonical flat ordering of every trainable scalar. The same layout drives
/// the optimizer, the penalty and the finite-difference checks, so counting
/// and updates can never drift apart.
struct ParamSlot {
    int block;        // distinct parameter-set index; -1 for fsi_alphas
    ParamField field;
    int offset;       // index inside the field's array (0 for scalars)
};

std::vector<ParamSlot> parameter_layout(const NetworkSpec& spec, const NetworkParams& params);

std::vector<double> flatten(const NetworkSpec& spec, const NetworkParams& params);
void unflatten(const NetworkSpec& spec, std::vector<double> flat, NetworkParams& params);
std::vector<double> flatten(const NetworkSpec& spec, const NetworkParams& params,
                            const GradientSet& grads);

/// Mutable access to one trainable scalar by slot.
double& param_ref(NetworkParams& params, const ParamSlot& slot);
double& grad_ref(GradientSet& grads, const ParamSlot& slot);

} // namespace pdenet
