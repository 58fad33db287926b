#pragma once

#include "pdenet/kernel.hpp"
#include "pdenet/signal.hpp"

namespace pdenet {

/// K u with reflecting boundaries (u_{-1} = u_0, u_N = u_{N-1}).
SignalBundle conv_apply(const SignalBundle& u, const KernelBank& k);

/// K^T v: the exact transpose of conv_apply's matrix (mirrored kernel,
/// transposed channel bank, boundary rows adjointed), so that
/// <Ku, v> = <u, K^T v> holds for every u, v.
SignalBundle conv_adjoint_apply(const SignalBundle& v, const KernelBank& k);

/// Gradient of <out_bar, conv_apply(in, K)> with respect to the taps of K.
/// Layout matches KernelBank::taps(). Shared by every backward pass.
std::vector<double> conv_weight_grad(const SignalBundle& out_bar, const SignalBundle& in);

/// Spectral norm ||K||_2 of the boundary-aware operator on length-N signals,
/// via power iteration on K^T K. Relative tolerance 1e-8; throws
/// NumericalError when 1e4 iterations do not converge.
double spectral_norm(const KernelBank& k, int n);

/// A-priori upper bound on ||K||_2 valid for every N >= 2, from exact
/// max row/col sums of the mirrored dense operator: sqrt(||K||_1 ||K||_inf).
/// Pure tap arithmetic; used by the Gershgorin rescaling and a-priori
/// stability mode.
double apriori_norm_bound(const KernelBank& k);

} // namespace pdenet
