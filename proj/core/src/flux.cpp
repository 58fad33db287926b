#include "pdenet/flux.hpp"
#include "pdenet/errors.hpp"

#include <cmath>

namespace pdenet {

FluxKind parse_flux_kind(const std::string& name) {
    if (name == "linear") return FluxKind::Linear;
    if (name == "charbonnier") return FluxKind::Charbonnier;
    if (name == "pm") return FluxKind::PeronaMalik;
    if (name == "relu") return FluxKind::ReLU;
    throw ConfigError("unknown flux kind '" + name + "' (expected linear|charbonnier|pm|relu)");
}

std::string flux_kind_name(FluxKind kind) {
    switch (kind) {
        case FluxKind::Linear: return "linear";
        case FluxKind::Charbonnier: return "charbonnier";
        case FluxKind::PeronaMalik: return "pm";
        case FluxKind::ReLU: return "relu";
    }
    return "linear";
}

bool flux_has_lambda(FluxKind kind) {
    return kind == FluxKind::Charbonnier || kind == FluxKind::PeronaMalik;
}

double diffusivity_eval(const FluxFunction& f, double s2) {
    if (s2 < 0.0) throw ConfigError("diffusivity_eval: s2 must be nonnegative");
    switch (f.kind) {
        case FluxKind::Linear: return 1.0;
        case FluxKind::Charbonnier: return 1.0 / std::sqrt(1.0 + s2 / (f.lambda * f.lambda));
        case FluxKind::PeronaMalik: return 1.0 / (1.0 + s2 / (f.lambda * f.lambda));
        case FluxKind::ReLU: break;
    }
    throw ConfigError("diffusivity_eval: the ReLU has no diffusivity");
}

double flux_eval(const FluxFunction& f, double s) {
    switch (f.kind) {
        case FluxKind::Linear: return s;
        case FluxKind::Charbonnier: return s / std::sqrt(1.0 + s * s / (f.lambda * f.lambda));
        case FluxKind::PeronaMalik: return s / (1.0 + s * s / (f.lambda * f.lambda));
        case FluxKind::ReLU: return s > 0.0 ? s : 0.0;
    }
    return s;
}

double flux_derivative(const FluxFunction& f, double s) {
    switch (f.kind) {
        case FluxKind::Linear: return 1.0;
        case FluxKind::Charbonnier: {
            const double q = 1.0 + s * s / (f.lambda * f.lambda);
            return 1.0 / (q * std::sqrt(q));
        }
        case FluxKind::PeronaMalik: {
            const double x = s * s / (f.lambda * f.lambda);
            const double q = 1.0 + x;
            return (1.0 - x) / (q * q);
        }
        case FluxKind::ReLU: return s > 0.0 ? 1.0 : 0.0;
    }
    return 1.0;
}

double flux_lambda_derivative(const FluxFunction& f, double s) {
    switch (f.kind) {
        case FluxKind::Linear:
        case FluxKind::ReLU: return 0.0;
        case FluxKind::Charbonnier: {
            const double l = f.lambda;
            const double q = 1.0 + s * s / (l * l);
            return s * s * s / (l * l * l) / (q * std::sqrt(q));
        }
        case FluxKind::PeronaMalik: {
            const double l = f.lambda;
            const double q = 1.0 + s * s / (l * l);
            return 2.0 * s * s * s / (l * l * l) / (q * q);
        }
    }
    return 0.0;
}

double lipschitz_constant(const FluxFunction&) {
    // |Phi'| is maximised at s = 0 for all three diffusion fluxes, where
    // Phi'(0) = g(0) = 1; the ReLU slope is 1 as well.
    return 1.0;
}

double penaliser_eval(const Penaliser& p, double s2) {
    if (s2 < 0.0) throw ConfigError("penaliser_eval: s2 must be nonnegative");
    switch (p.kind) {
        case FluxKind::Linear: return s2;
        case FluxKind::Charbonnier: {
            const double l2 = p.lambda * p.lambda;
            return 2.0 * l2 * (std::sqrt(1.0 + s2 / l2) - 1.0);
        }
        case FluxKind::PeronaMalik: {
            const double l2 = p.lambda * p.lambda;
            return l2 * std::log1p(s2 / l2);
        }
        case FluxKind::ReLU: break;
    }
    throw ConfigError("penaliser_eval: no penaliser for the ReLU");
}

} // namespace pdenet
