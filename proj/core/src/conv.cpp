#include "pdenet/conv.hpp"
#include "pdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pdenet {

namespace {
inline int mirror(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }
} // namespace

SignalBundle conv_apply(const SignalBundle& u, const KernelBank& k) {
    if (u.channels() != k.in_channels())
        throw DimensionError("conv_apply: signal channels do not match kernel input channels");
    const int n = u.length();
    SignalBundle out(k.out_channels(), n, u.spacing());
    for (int co = 0; co < k.out_channels(); ++co) {
        auto dst = out.channel(co);
        for (int ci = 0; ci < k.in_channels(); ++ci) {
            const double kl = k.tap(co, ci, 0);
            const double km = k.tap(co, ci, 1);
            const double kr = k.tap(co, ci, 2);
            if (kl == 0.0 && km == 0.0 && kr == 0.0) continue;
            auto src = u.channel(ci);
            dst[0] += (kl + km) * src[0] + kr * src[mirror(1, n)];
            for (int i = 1; i < n - 1; ++i)
                dst[i] += kl * src[i - 1] + km * src[i] + kr * src[i + 1];
            if (n > 1)
                dst[n - 1] += kl * src[n - 2] + (km + kr) * src[n - 1];
        }
    }
    return out;
}

SignalBundle conv_adjoint_apply(const SignalBundle& v, const KernelBank& k) {
    if (v.channels() != k.out_channels())
        throw DimensionError("conv_adjoint_apply: signal channels do not match kernel output channels");
    const int n = v.length();
    SignalBundle out(k.in_channels(), n, v.spacing());
    // Scatter form of the forward loop: transpose by construction.
    for (int co = 0; co < k.out_channels(); ++co) {
        auto src = v.channel(co);
        for (int ci = 0; ci < k.in_channels(); ++ci) {
            const double kl = k.tap(co, ci, 0);
            const double km = k.tap(co, ci, 1);
            const double kr = k.tap(co, ci, 2);
            if (kl == 0.0 && km == 0.0 && kr == 0.0) continue;
            auto dst = out.channel(ci);
            dst[0] += (kl + km) * src[0];
            dst[mirror(1, n)] += kr * src[0];
            for (int i = 1; i < n - 1; ++i) {
                dst[i - 1] += kl * src[i];
                dst[i] += km * src[i];
                dst[i + 1] += kr * src[i];
            }
            if (n > 1) {
                dst[n - 2] += kl * src[n - 1];
                dst[n - 1] += (km + kr) * src[n - 1];
            }
        }
    }
    return out;
}

std::vector<double> conv_weight_grad(const SignalBundle& out_bar, const SignalBundle& in) {
    const int n = in.length();
    if (out_bar.length() != n)
        throw DimensionError("conv_weight_grad: length mismatch");
    std::vector<double> grad(static_cast<size_t>(out_bar.channels()) * in.channels() * 3, 0.0);
    for (int co = 0; co < out_bar.channels(); ++co) {
        auto ob = out_bar.channel(co);
        for (int ci = 0; ci < in.channels(); ++ci) {
            auto src = in.channel(ci);
            double gl = 0.0, gm = 0.0, gr = 0.0;
            for (int i = 0; i < n; ++i) {
                const double b = ob[i];
                gl += b * src[mirror(i - 1, n)];
                gm += b * src[i];
                gr += b * src[mirror(i + 1, n)];
            }
            const size_t base = (static_cast<size_t>(co) * in.channels() + ci) * 3;
            grad[base + 0] = gl;
            grad[base + 1] = gm;
            grad[base + 2] = gr;
        }
    }
    return grad;
}

namespace {

// Largest eigenvalue of a symmetric tridiagonal matrix (diagonal a, **squared**
// off-diagonals b2) by Sturm-sequence bisection.
double tridiag_max_eigenvalue(const std::vector<double>& a, const std::vector<double>& b2) {
    const int m = static_cast<int>(a.size());
    double hi = a[0], lo = a[0];
    for (int i = 0; i < m; ++i) {
        const double bl = i > 0 ? std::sqrt(b2[i - 1]) : 0.0;
        const double br = i + 1 < m ? std::sqrt(b2[i]) : 0.0;
        hi = std::max(hi, a[i] + bl + br);
        lo = std::min(lo, a[i] - bl - br);
    }
    // count of eigenvalues strictly below x
    auto count_below = [&](double x) {
        int cnt = 0;
        double d = 1.0;
        for (int i = 0; i < m; ++i) {
            d = a[i] - x - (i > 0 ? b2[i - 1] / d : 0.0);
            if (d == 0.0) d = -1e-300;
            if (d < 0.0) ++cnt;
        }
        return cnt;
    };
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= m)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double spectral_norm(const KernelBank& k, int n) {
    if (n < 2) throw DimensionError("spectral_norm: length must be >= 2");
    if (k.all_zero()) return 0.0;

    // Lanczos on K^T K with full reorthogonalisation and a fixed-seed start
    // vector. Derivative kernels have strongly clustered top singular values,
    // which a Krylov basis resolves where plain power iteration stalls.
    const int dim = k.in_channels() * n;
    const int max_steps = std::min(dim, 10000);

    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SignalBundle v(k.in_channels(), n);
    for (double& x : v.data()) x = dist(rng);
    double vn = v.norm();
    for (double& x : v.data()) x /= vn;

    std::vector<std::vector<double>> basis;
    basis.push_back(v.data());
    std::vector<double> alpha, beta2;
    double prev_est = -1.0;
    int stable = 0;

    for (int j = 0; j < max_steps; ++j) {
        SignalBundle w = conv_adjoint_apply(conv_apply(v, k), k);
        double a = 0.0;
        for (int i = 0; i < dim; ++i) a += w.data()[i] * basis[j][i];
        alpha.push_back(a);
        // full reorthogonalisation, two passes
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                double c = 0.0;
                for (int i = 0; i < dim; ++i) c += w.data()[i] * q[i];
                for (int i = 0; i < dim; ++i) w.data()[i] -= c * q[i];
            }
        }
        const double b = w.norm();
        const double est = tridiag_max_eigenvalue(alpha, beta2);
        if (b <= 1e-14 * std::max(1.0, est)) return std::sqrt(std::max(est, 0.0));
        if (prev_est >= 0.0 && std::abs(est - prev_est) <= 1e-14 * std::max(1.0, est)) {
            if (++stable >= 2) return std::sqrt(std::max(est, 0.0));
        } else {
            stable = 0;
        }
        prev_est = est;
        beta2.push_back(b * b);
        for (int i = 0; i < dim; ++i) v.data()[i] = w.data()[i] / b;
        basis.push_back(v.data());
    }
    if (static_cast<int>(alpha.size()) == dim) {
        // exhausted the full space: the tridiagonal eigenvalue is exact
        return std::sqrt(std::max(tridiag_max_eigenvalue(alpha, beta2), 0.0));
    }
    throw NumericalError("spectral_norm: Lanczos iteration did not converge in 10^4 steps");
}

double apriori_norm_bound(const KernelBank& k) {
    // Exact max row / column absolute sums of the mirrored dense operator
    // (valid for every N >= 2): rows fold the left tap at i=0 and the right
    // tap at i=N-1; columns receive an extra fold contribution at the ends.
    const int co_n = k.out_channels(), ci_n = k.in_channels();
    double row_max = 0.0;
    for (int co = 0; co < co_n; ++co) {
        double interior = 0.0, left = 0.0, right = 0.0;
        for (int ci = 0; ci < ci_n; ++ci) {
            const double kl = k.tap(co, ci, 0), km = k.tap(co, ci, 1), kr = k.tap(co, ci, 2);
            interior += std::abs(kl) + std::abs(km) + std::abs(kr);
            left += std::abs(kl + km) + std::abs(kr);
            right += std::abs(kl) + std::abs(km + kr);
        }
        row_max = std::max({row_max, interior, left, right});
    }
    double col_max = 0.0;
    for (int ci = 0; ci < ci_n; ++ci) {
        double interior = 0.0, first = 0.0, last = 0.0;
        for (int co = 0; co < co_n; ++co) {
            const double kl = k.tap(co, ci, 0), km = k.tap(co, ci, 1), kr = k.tap(co, ci, 2);
            interior += std::abs(kl) + std::abs(km) + std::abs(kr);
            first += std::abs(kl + km) + std::abs(kl);
            last += std::abs(km + kr) + std::abs(kr);
        }
        col_max = std::max({col_max, interior, first, last});
    }
    return std::sqrt(row_max * col_max);
}

} // namespace pdenet
