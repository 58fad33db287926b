#pragma once

#include <string>

namespace pdenet {

enum class FluxKind { Linear, Charbonnier, PeronaMalik, ReLU };

FluxKind parse_flux_kind(const std::string& name); // linear | charbonnier | pm | relu
std::string flux_kind_name(FluxKind kind);
/// Contrast parameter applies to Charbonnier and Perona-Malik only.
bool flux_has_lambda(FluxKind kind);

/// Diffusion flux used as an activation: Phi(s) = g(s^2) s.
/// The ReLU is admitted as an activation without diffusivity semantics.
struct FluxFunction {
    FluxKind kind = FluxKind::Linear;
    double lambda = 1.0;
};

/// g(s2). Throws ConfigError for the ReLU, which has no diffusivity.
double diffusivity_eval(const FluxFunction& f, double s2);

/// Phi(s); odd for the three diffusion fluxes, max(0, s) for the ReLU.
double flux_eval(const FluxFunction& f, double s);

/// Analytic Phi'(s); ReLU derivative at 0 is defined as 0.
double flux_derivative(const FluxFunction& f, double s);

/// d Phi(s; lambda) / d lambda. Zero for Linear and ReLU.
double flux_lambda_derivative(const FluxFunction& f, double s);

/// L = sup_s |Phi'(s)|; exact for the whole catalog.
double lipschitz_constant(const FluxFunction& f);

/// Penaliser Psi with g = Psi'. Defined for the diffusion fluxes only.
struct Penaliser {
    FluxKind kind = FluxKind::Linear;
    double lambda = 1.0;
};

/// Psi(s2): Linear z, Charbonnier 2 lambda^2 (sqrt(1 + z/lambda^2) - 1),
/// Perona-Malik lambda^2 ln(1 + z/lambda^2). Throws on negative s2.
double penaliser_eval(const Penaliser& p, double s2);

} // namespace pdenet
