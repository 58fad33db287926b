#pragma once

#include "pdenet/mg/problem.hpp"

#include <vector>

namespace pdenet {
namespace mg {

struct SmootherOptions {
    double omega = 0.8; ///< damping on inpainting rows; data rows solve exactly
};

/// Damped nonlinear Jacobi on A(x) = A(y) + b with the tensor recomputed from
/// the iterate before every sweep. Rows with c = 1 are decoupled (x_i = rhs_i)
/// and are set exactly. The residual channel is refreshed after the last
/// sweep, also for sweeps = 0.
void smooth(SolverState& state, const InpaintingProblem& prob, int sweeps,
            const SmootherOptions& opts = {});

/// One FAS two-grid cycle: presmooth, restrict (y_H = R x, b_H = R r, coarse
/// start x_H = y_H), coarse solve by extended smoothing (50 sweeps), prolong
/// the correction, correct, postsmooth.
SolverState fas_two_grid(SolverState state, const InpaintingProblem& fine,
                         const InpaintingProblem& coarse, int pre_sweeps, int post_sweeps,
                         const SmootherOptions& opts = {});

/// Recursive FAS V-cycle over `depth` levels of the hierarchy starting at
/// `level`; depth 1 is plain smoothing, the coarsest level always gets the
/// extended 50-sweep solve.
SolverState v_cycle(const GridHierarchy& hierarchy, SolverState state, int level, int depth,
                    int pre_sweeps, int post_sweeps, const SmootherOptions& opts = {});

struct FmgOptions {
    int pre_sweeps = 3;
    int post_sweeps = 3;
    int coarsest_sweeps = 50;
    int max_fine_cycles = 1000;
    SmootherOptions smoother;
};

struct ResidualLogEntry {
    int visit = 0;
    int level = 0;
    double residual = 0.0; ///< mean absolute residual of that level's system
};

struct FmgResult {
    Image2D reconstruction;
    std::vector<ResidualLogEntry> log;
    double work_units = 0.0; ///< fine-grid-equivalent smoothing sweeps
    bool converged = false;
    double final_residual = 0.0;
};

/// Full multigrid over three grids with the fixed visit schedule
/// [4h, 2h, 4h, 2h, h, 2h, 4h, 2h, 4h, 2h, h], carrying FAS state between
/// levels; continues with fine-level V-cycles until the mean absolute
/// fine-grid residual reaches tol or the cycle cap is hit.
FmgResult fmg_solve(const InpaintingProblem& prob, double tol, const FmgOptions& opts = {});

/// Single-grid smoothing reference (work-unit comparisons): smooths until the
/// residual reaches tol or `max_sweeps` is exhausted; returns sweeps used and
/// the residual trace every `log_every` sweeps.
struct SingleGridResult {
    Image2D reconstruction;
    double final_residual = 0.0;
    int sweeps = 0;
    bool converged = false;
};
SingleGridResult single_grid_solve(const InpaintingProblem& prob, double tol, int max_sweeps,
                                   const SmootherOptions& opts = {});

} // namespace mg
} // namespace pdenet
