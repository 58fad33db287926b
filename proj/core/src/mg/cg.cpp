#include "pdenet/mg/cg.hpp"
#include "pdenet/errors.hpp"

#include <cmath>
#include <string>

namespace pdenet {
namespace mg {

namespace {

double dot(const Image2D& a, const Image2D& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.data().size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

} // namespace

CgResult cg_reference_solve(const InpaintingProblem& prob, double tol, const CgOptions& opts) {
    if (!(tol > 0.0)) throw ConfigError("cg_reference_solve: tol must be positive");
    prob.validate();
    const int hgt = prob.f.height(), wid = prob.f.width();
    const size_t n = prob.f.data().size();

    CgResult result;
    // known pixels pinned to the data, unknowns start at zero
    Image2D u(hgt, wid, prob.f.spacing());
    for (size_t i = 0; i < n; ++i) u.data()[i] = prob.mask.data()[i] * prob.f.data()[i];
    Image2D rhs = u; // b = c.f

    double best = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        result.outer_iterations = outer + 1;
        const TensorField tensor = problem_tensor(prob, u);
        InpaintingProblem lin = prob;
        lin.frozen_tensor = tensor;

        // nonlinear residual at the current iterate (zero on mask rows)
        Image2D residual = apply_operator(lin, u, tensor);
        for (size_t i = 0; i < n; ++i) residual.data()[i] = rhs.data()[i] - residual.data()[i];
        result.residual = residual_norm(residual);
        if (result.residual <= tol) {
            result.converged = true;
            break;
        }
        if (result.residual > 1e3 * best && outer > 5)
            throw NumericalError("cg_reference_solve: lagged diffusivity diverged (residual " +
                                 std::to_string(result.residual) + ")");
        best = std::min(best, result.residual);

        // inner SPD solve: A_T d = residual on the unknown pixels (d = 0 on
        // the mask keeps the Dirichlet elimination implicit)
        const Image2D diag = operator_diagonal(lin, tensor);
        Image2D d(hgt, wid, prob.f.spacing());
        Image2D r = residual;
        Image2D z(hgt, wid, prob.f.spacing());
        for (size_t i = 0; i < n; ++i) z.data()[i] = r.data()[i] / diag.data()[i];
        Image2D p = z;
        double rz = dot(r, z);
        const double r0 = std::sqrt(dot(r, r));
        const double target =
            std::max(opts.inner_rel_drop * r0, 0.1 * tol * std::sqrt(static_cast<double>(n)));

        while (result.inner_iterations < opts.max_inner) {
            Image2D ap = apply_operator(lin, p, tensor);
            const double p_ap = dot(p, ap);
            if (!(p_ap > 0.0)) {
                if (std::sqrt(dot(r, r)) <= target * 1.001) break;
                throw NumericalError(
                    "cg_reference_solve: CG breakdown, p^T A p = " + std::to_string(p_ap) +
                    " at outer iteration " + std::to_string(outer));
            }
            const double step = rz / p_ap;
            for (size_t i = 0; i < n; ++i) {
                d.data()[i] += step * p.data()[i];
                r.data()[i] -= step * ap.data()[i];
            }
            ++result.inner_iterations;
            if (std::sqrt(dot(r, r)) <= target) break;
            for (size_t i = 0; i < n; ++i) z.data()[i] = r.data()[i] / diag.data()[i];
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (size_t i = 0; i < n; ++i) p.data()[i] = z.data()[i] + beta * p.data()[i];
        }
        for (size_t i = 0; i < n; ++i) u.data()[i] += d.data()[i];
    }

    result.reconstruction = std::move(u);
    return result;
}

} // namespace mg
} // namespace pdenet
