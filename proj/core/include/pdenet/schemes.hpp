#pragma once

#include "pdenet/conv.hpp"
#include "pdenet/flux.hpp"

#include <complex>
#include <utility>

namespace pdenet {

/// Parameters of the 1D time-stepping schemes.
struct SchemeConfig {
    double tau = 0.1;          ///< time step size
    double alpha = 1.0;        ///< Du Fort-Frankel stabilisation weight
    int cycle_length = 1;      ///< L for FSI / implicit fixed point
    FluxFunction flux;
};

/// Step-size and extrapolation bounds from the Euclidean stability theory:
/// tau_max = 2 / (L ||K||^2), alpha_min = L ||K||^2 / 4.
struct StabilityReport {
    double spectral_norm_sq = 0.0;
    double lipschitz = 1.0;
    double tau_max = 0.0;
    double alpha_min = 0.0;
};

/// One explicit diffusion step u - tau K^T Phi(K u).
/// Throws NumericalError if the result contains non-finite values.
SignalBundle explicit_step(const SignalBundle& u, const KernelBank& k, const SchemeConfig& cfg);

/// Apply the flux elementwise: Phi(K u) evaluated on a precomputed K u.
void apply_flux_inplace(SignalBundle& pre_activation, const FluxFunction& f);

StabilityReport stability_bound(const KernelBank& k, int n, const FluxFunction& f);

/// A-priori rescaling: per channel-block division by the largest absolute
/// row sum, an extra 1/sqrt(C) for multi-channel banks, and a final division
/// by the rigorous tap-level norm bound when the mirrored boundary still
/// leaves ||K||_2 above 1. Guarantees ||rescaled||_2 <= 1 for every N.
KernelBank gershgorin_rescale(const KernelBank& k);

/// Du Fort-Frankel step combining an inner explicit step of size 1/(2 alpha)
/// on u_k with an extrapolation against u_km1. The two scalar weights sum
/// to one; tau*alpha = 1/2 reproduces the explicit scheme.
SignalBundle dufort_frankel_step(const SignalBundle& u_k, const SignalBundle& u_km1,
                                 const KernelBank& k, const SchemeConfig& cfg);

/// Both roots of mu^2 - gamma mu - (1 - 2 tau alpha)/(1 + 2 tau alpha) = 0,
/// the eigenvalue equation of the Du Fort-Frankel multistep matrix.
std::pair<std::complex<double>, std::complex<double>>
df_multistep_eigenvalues(double gamma, double tau, double alpha);

/// FSI extrapolation weight alpha_l = (4l + 2) / (2l + 3).
double fsi_weight(int ell);

/// One fast semi-iterative cycle of length L (cfg.cycle_length), formula
/// weights, initialised with u^{k-1/L} := u^k.
SignalBundle fsi_cycle(const SignalBundle& u, const KernelBank& k, const SchemeConfig& cfg);

/// Fixed-point iteration for the implicit scheme: L inner iterations of
/// u^{k+(l+1)/L} = u^k - tau K^T Phi(K u^{k+l/L}). Throws NumericalError
/// when iterates exceed 1e6 times the input norm (contraction violated).
SignalBundle implicit_fixed_point(const SignalBundle& u, const KernelBank& k,
                                  const SchemeConfig& cfg);

/// Discrete energy h * sum_i Psi((K u)_i^2).
double energy_eval(const SignalBundle& u, const KernelBank& k, const Penaliser& p);

} // namespace pdenet
