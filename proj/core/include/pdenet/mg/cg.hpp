#pragma once

#include "pdenet/mg/problem.hpp"

namespace pdenet {
namespace mg {

struct CgOptions {
    int max_outer = 2000;       ///< lagged-diffusivity iterations
    int max_inner = 200000;     ///< total CG iterations across the run
    double inner_rel_drop = 0.05; ///< per-solve l2 reduction target
};

struct CgResult {
    Image2D reconstruction;
    double residual = 0.0; ///< mean absolute nonlinear residual
    int outer_iterations = 0;
    long inner_iterations = 0;
    bool converged = false;
};

/// Reference solver: lagged-diffusivity outer loop (tensor frozen at the
/// current iterate), inner Jacobi-preconditioned conjugate gradients on the
/// unknown pixels (known pixels eliminated as Dirichlet data), until the
/// nonlinear mean absolute residual drops below tol.
CgResult cg_reference_solve(const InpaintingProblem& prob, double tol, const CgOptions& opts = {});

} // namespace mg
} // namespace pdenet
