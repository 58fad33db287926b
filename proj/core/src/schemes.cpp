#include "pdenet/schemes.hpp"
#include "pdenet/errors.hpp"

#include <cmath>
#include <limits>

namespace pdenet {

void apply_flux_inplace(SignalBundle& pre_activation, const FluxFunction& f) {
    for (double& v : pre_activation.data()) v = flux_eval(f, v);
}

SignalBundle explicit_step(const SignalBundle& u, const KernelBank& k, const SchemeConfig& cfg) {
    if (!k.square()) throw DimensionError("explicit_step: kernel bank must be square");
    SignalBundle activation = conv_apply(u, k);
    apply_flux_inplace(activation, cfg.flux);
    SignalBundle update = conv_adjoint_apply(activation, k);
    SignalBundle out = u;
    for (size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= cfg.tau * update.data()[i];
    out.require_finite("explicit_step");
    return out;
}

StabilityReport stability_bound(const KernelBank& k, int n, const FluxFunction& f) {
    StabilityReport report;
    report.lipschitz = lipschitz_constant(f);
    const double norm = spectral_norm(k, n);
    report.spectral_norm_sq = norm * norm;
    if (report.spectral_norm_sq == 0.0) {
        report.tau_max = std::numeric_limits<double>::infinity();
        report.alpha_min = 0.0;
    } else {
        report.tau_max = 2.0 / (report.lipschitz * report.spectral_norm_sq);
        report.alpha_min = report.lipschitz * report.spectral_norm_sq / 4.0;
    }
    return report;
}

KernelBank gershgorin_rescale(const KernelBank& k) {
    if (!k.square()) throw DimensionError("gershgorin_rescale: kernel bank must be square");
    if (k.all_zero()) return k;
    KernelBank out = k;
    const int c = k.out_channels();
    for (int co = 0; co < c; ++co) {
        for (int ci = 0; ci < c; ++ci) {
            const double s = std::abs(k.tap(co, ci, 0)) + std::abs(k.tap(co, ci, 1)) +
                             std::abs(k.tap(co, ci, 2));
            if (s == 0.0) continue;
            for (int t = 0; t < 3; ++t) out.tap(co, ci, t) /= s;
        }
    }
    if (c > 1) {
        const double root_c = std::sqrt(static_cast<double>(c));
        for (double& t : out.taps()) t /= root_c;
    }
    // The row-sum rule bounds the spectral radius, not the spectral norm;
    // the mirrored boundary makes K non-normal, so a final correction by the
    // rigorous tap bound is needed for ||K||_2 <= 1 to hold for every bank.
    const double bound = apriori_norm_bound(out);
    if (bound > 1.0)
        for (double& t : out.taps()) t /= bound;
    return out;
}

SignalBundle dufort_frankel_step(const SignalBundle& u_k, const SignalBundle& u_km1,
                                 const KernelBank& k, const SchemeConfig& cfg) {
    if (!u_k.same_shape(u_km1))
        throw DimensionError("dufort_frankel_step: time levels differ in shape");
    if (!(cfg.alpha > 0.0)) throw ConfigError("dufort_frankel_step: alpha must be positive");
    const double denom = 1.0 + 2.0 * cfg.tau * cfg.alpha;
    const double w_new = 4.0 * cfg.tau * cfg.alpha / denom;
    const double w_old = (1.0 - 2.0 * cfg.tau * cfg.alpha) / denom;

    SchemeConfig inner = cfg;
    inner.tau = 1.0 / (2.0 * cfg.alpha);
    SignalBundle diffused = explicit_step(u_k, k, inner);

    SignalBundle out = u_k;
    for (size_t i = 0; i < out.data().size(); ++i)
        out.data()[i] = w_new * diffused.data()[i] + w_old * u_km1.data()[i];
    out.require_finite("dufort_frankel_step");
    return out;
}

std::pair<std::complex<double>, std::complex<double>>
df_multistep_eigenvalues(double gamma, double tau, double alpha) {
    const double q = (1.0 - 2.0 * tau * alpha) / (1.0 + 2.0 * tau * alpha);
    const std::complex<double> disc(gamma * gamma / 4.0 + q, 0.0);
    const std::complex<double> root = std::sqrt(disc);
    return {gamma / 2.0 + root, gamma / 2.0 - root};
}

double fsi_weight(int ell) { return (4.0 * ell + 2.0) / (2.0 * ell + 3.0); }

SignalBundle fsi_cycle(const SignalBundle& u, const KernelBank& k, const SchemeConfig& cfg) {
    if (cfg.cycle_length < 1) throw ConfigError("fsi_cycle: cycle length must be >= 1");
    SignalBundle prev = u;    // u^{k + (l-1)/L}, initialised to u^k
    SignalBundle current = u; // u^{k + l/L}
    for (int ell = 0; ell < cfg.cycle_length; ++ell) {
        const double a = fsi_weight(ell);
        SignalBundle diffused = explicit_step(current, k, cfg);
        SignalBundle next = current;
        for (size_t i = 0; i < next.data().size(); ++i)
            next.data()[i] = a * diffused.data()[i] + (1.0 - a) * prev.data()[i];
        prev = std::move(current);
        current = std::move(next);
    }
    current.require_finite("fsi_cycle");
    return current;
}

SignalBundle implicit_fixed_point(const SignalBundle& u, const KernelBank& k,
                                  const SchemeConfig& cfg) {
    if (cfg.cycle_length < 1) throw ConfigError("implicit_fixed_point: cycle length must be >= 1");
    const double anchor_norm = std::max(u.norm(), 1.0);
    SignalBundle iterate = u;
    for (int ell = 0; ell < cfg.cycle_length; ++ell) {
        SignalBundle activation = conv_apply(iterate, k);
        apply_flux_inplace(activation, cfg.flux);
        SignalBundle update = conv_adjoint_apply(activation, k);
        for (size_t i = 0; i < iterate.data().size(); ++i)
            iterate.data()[i] = u.data()[i] - cfg.tau * update.data()[i];
        if (iterate.norm() > 1e6 * anchor_norm)
            throw NumericalError(
                "implicit_fixed_point: iterate norm exploded; tau too large for a contraction");
    }
    iterate.require_finite("implicit_fixed_point");
    return iterate;
}

double energy_eval(const SignalBundle& u, const KernelBank& k, const Penaliser& p) {
    SignalBundle d = conv_apply(u, k);
    double sum = 0.0;
    for (double v : d.data()) sum += penaliser_eval(p, v * v);
    return u.spacing() * sum;
}

} // namespace pdenet
