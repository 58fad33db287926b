#pragma once

#include "pdenet/mg/tensor.hpp"

#include <optional>
#include <vector>

namespace pdenet {
namespace mg {

/// Inpainting task: reconstruct u with
///   (1 - c) div(D(u) grad u) - c (u - f) = 0,
/// c the binary confidence mask (1 = known data).
///
/// The solvers work with A(u) := -(1-c) div(D(u) grad u) + c u and the
/// right hand side b = c f, so A(0) = 0 and the FAS bookkeeping A(x) =
/// A(y) + b holds on every level with y = 0 at the top.
struct InpaintingProblem {
    Image2D f;
    Image2D mask;
    double lambda = 1.0;
    double sigma = 1.0; ///< presmoothing scale in fine-grid pixels at h=1 (physical units)
    /// When set, the operator is linear with this fixed tensor (tests, CG inner loop).
    std::optional<TensorField> frozen_tensor;

    void validate() const;
    /// Presmoothing scale in this level's pixels.
    double sigma_pixels() const { return sigma / f.spacing(); }
};

/// The four FAS channels on one grid level.
struct SolverState {
    Image2D x, y, b, r;

    static SolverState zeros(int height, int width, double h);
};

/// Top-level state: x0 = c.f (known data), y = 0, b = c.f.
SolverState initial_state(const InpaintingProblem& prob);

/// Diffusion tensor for the current iterate (frozen tensor when present).
TensorField problem_tensor(const InpaintingProblem& prob, const Image2D& iterate);

/// A(u) with the given tensor. The 3x3 stencil uses half-point averaging for
/// the axial terms and central differences for the mixed terms; the mixed
/// channel is zeroed on the outermost pixel ring so that the operator matrix
/// stays exactly symmetric under the mirrored boundary.
Image2D apply_operator(const InpaintingProblem& prob, const Image2D& u, const TensorField& tensor);

/// Jacobi diagonal of A with the given tensor (mask rows have diagonal 1).
Image2D operator_diagonal(const InpaintingProblem& prob, const TensorField& tensor);

/// r = (A(y) + b) - A(u); passing y = 0, b = c.f gives the residual of the
/// plain inpainting equation.
Image2D eed_residual(const InpaintingProblem& prob, const Image2D& u, const Image2D& y,
                     const Image2D& b);

/// Mean absolute value, the convergence measure of every solver here.
double residual_norm(const Image2D& r);

/// Per-level problems: dims ceil-halved, mask coarsened by the OR rule,
/// image by 2x2 averaging, spacing doubled.
struct GridHierarchy {
    std::vector<InpaintingProblem> levels;
};
GridHierarchy build_hierarchy(const InpaintingProblem& prob, int levels);

} // namespace mg
} // namespace pdenet
