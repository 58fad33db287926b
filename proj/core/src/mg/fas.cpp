#include "pdenet/mg/fas.hpp"
#include "pdenet/errors.hpp"
#include "pdenet/mg/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace pdenet {
namespace mg {

namespace {

bool is_zero(const Image2D& im) {
    for (double v : im.data())
        if (v != 0.0) return false;
    return true;
}

// rhs = A(y) + b with the tensor taken from y; A(0) = 0 shortcut.
Image2D system_rhs(const SolverState& state, const InpaintingProblem& prob) {
    Image2D rhs = state.b;
    if (!is_zero(state.y)) {
        const TensorField ty = problem_tensor(prob, state.y);
        Image2D ay = apply_operator(prob, state.y, ty);
        for (size_t i = 0; i < rhs.data().size(); ++i) rhs.data()[i] += ay.data()[i];
    }
    return rhs;
}

} // namespace

void smooth(SolverState& state, const InpaintingProblem& prob, int sweeps,
            const SmootherOptions& opts) {
    if (sweeps < 0) throw ConfigError("smooth: sweeps must be nonnegative");
    const Image2D rhs = system_rhs(state, prob);
    const size_t n = state.x.data().size();

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        const TensorField t = problem_tensor(prob, state.x);
        const Image2D ax = apply_operator(prob, state.x, t);
        const Image2D diag = operator_diagonal(prob, t);
        for (size_t i = 0; i < n; ++i) {
            const double w = prob.mask.data()[i] == 1.0 ? 1.0 : opts.omega;
            state.x.data()[i] += w * (rhs.data()[i] - ax.data()[i]) / diag.data()[i];
        }
    }

    const TensorField t = problem_tensor(prob, state.x);
    const Image2D ax = apply_operator(prob, state.x, t);
    for (size_t i = 0; i < n; ++i) state.r.data()[i] = rhs.data()[i] - ax.data()[i];
}

namespace {

// y_H = R x, b_H = R r, coarse iterate starts at y_H.
SolverState restrict_state(const SolverState& fine) {
    SolverState coarse;
    coarse.y = restrict_image(fine.x);
    coarse.b = restrict_image(fine.r);
    coarse.x = coarse.y;
    coarse.r = Image2D::zeros(coarse.x.height(), coarse.x.width(), coarse.x.spacing());
    return coarse;
}

void apply_correction(SolverState& fine, const SolverState& coarse) {
    Image2D error = coarse.x;
    for (size_t i = 0; i < error.data().size(); ++i) error.data()[i] -= coarse.y.data()[i];
    const Image2D up = prolong(error, fine.x.height(), fine.x.width());
    for (size_t i = 0; i < fine.x.data().size(); ++i) fine.x.data()[i] += up.data()[i];
}

// Shared recursion of fas_two_grid / v_cycle / fmg with an optional observer
// that sees every smoothing visit.
struct VisitObserver {
    std::vector<ResidualLogEntry>* log = nullptr;
    double* work_units = nullptr;
    int visit = 0;

    void record(int level, int sweeps, double residual) {
        ++visit;
        if (work_units) *work_units += sweeps * std::pow(4.0, -level);
        if (log) log->push_back({visit, level, residual});
    }
};

void run_smooth(SolverState& state, const InpaintingProblem& prob, int level, int sweeps,
                const SmootherOptions& opts, VisitObserver* obs) {
    smooth(state, prob, sweeps, opts);
    if (obs) obs->record(level, sweeps, residual_norm(state.r));
}

// after prolonging a coarse solution, known pixels snap back to their data
void reimpose_known(Image2D& x, const InpaintingProblem& prob) {
    for (size_t i = 0; i < x.data().size(); ++i)
        if (prob.mask.data()[i] == 1.0) x.data()[i] = prob.f.data()[i];
}

void cycle(const GridHierarchy& hier, SolverState& state, int level, int depth, int pre, int post,
           int coarsest_sweeps, const SmootherOptions& opts, VisitObserver* obs) {
    if (depth <= 1) {
        run_smooth(state, hier.levels[level], level, pre + post, opts, obs);
        return;
    }
    run_smooth(state, hier.levels[level], level, pre, opts, obs);
    SolverState coarse = restrict_state(state);
    if (depth == 2)
        run_smooth(coarse, hier.levels[level + 1], level + 1, coarsest_sweeps, opts, obs);
    else
        cycle(hier, coarse, level + 1, depth - 1, pre, post, coarsest_sweeps, opts, obs);
    apply_correction(state, coarse);
    run_smooth(state, hier.levels[level], level, post, opts, obs);
}

} // namespace

SolverState fas_two_grid(SolverState state, const InpaintingProblem& fine,
                         const InpaintingProblem& coarse, int pre_sweeps, int post_sweeps,
                         const SmootherOptions& opts) {
    GridHierarchy hier;
    hier.levels.push_back(fine);
    hier.levels.push_back(coarse);
    cycle(hier, state, 0, 2, pre_sweeps, post_sweeps, 50, opts, nullptr);
    return state;
}

SolverState v_cycle(const GridHierarchy& hierarchy, SolverState state, int level, int depth,
                    int pre_sweeps, int post_sweeps, const SmootherOptions& opts) {
    if (level + depth > static_cast<int>(hierarchy.levels.size()))
        throw ConfigError("v_cycle: depth exceeds the hierarchy");
    cycle(hierarchy, state, level, depth, pre_sweeps, post_sweeps, 50, opts, nullptr);
    return state;
}

FmgResult fmg_solve(const InpaintingProblem& prob, double tol, const FmgOptions& opts) {
    if (!(tol > 0.0)) throw ConfigError("fmg_solve: tol must be positive");
    prob.validate();
    const GridHierarchy hier = build_hierarchy(prob, 3);
    const int coarsest = static_cast<int>(hier.levels.size()) - 1;

    FmgResult result;
    VisitObserver obs;
    obs.log = &result.log;
    obs.work_units = &result.work_units;

    auto finished = [&](const SolverState& s0) {
        result.final_residual = residual_norm(s0.r);
        return result.final_residual <= tol;
    };

    // descent phase: solve the rediscretised problem per level, carrying the
    // iterate upward; [4h], [2h 4h 2h] when three grids are available
    SolverState carried = initial_state(hier.levels[coarsest]);
    run_smooth(carried, hier.levels[coarsest], coarsest, opts.coarsest_sweeps, opts.smoother,
               &obs);
    for (int level = coarsest - 1; level >= 1; --level) {
        SolverState st = initial_state(hier.levels[level]);
        st.x = prolong(carried.x, st.x.height(), st.x.width());
        reimpose_known(st.x, hier.levels[level]);
        run_smooth(st, hier.levels[level], level, opts.pre_sweeps, opts.smoother, &obs);
        SolverState cs = restrict_state(st);
        run_smooth(cs, hier.levels[level + 1], level + 1, opts.coarsest_sweeps, opts.smoother,
                   &obs);
        apply_correction(st, cs);
        run_smooth(st, hier.levels[level], level, opts.post_sweeps, opts.smoother, &obs);
        carried = std::move(st);
    }

    // finest stage: [h 2h 4h 2h 4h 2h h] — a V-cycle whose level-1 solve is a
    // double two-grid with the middle smoothing visit shared
    SolverState fine = initial_state(hier.levels[0]);
    if (coarsest >= 1) {
        fine.x = prolong(carried.x, fine.x.height(), fine.x.width());
        reimpose_known(fine.x, hier.levels[0]);
    }
    run_smooth(fine, hier.levels[0], 0, opts.pre_sweeps, opts.smoother, &obs);
    if (finished(fine)) {
        result.converged = true;
        result.reconstruction = fine.x;
        return result;
    }
    if (coarsest >= 1) {
        SolverState s1 = restrict_state(fine);
        if (coarsest >= 2) {
            run_smooth(s1, hier.levels[1], 1, opts.pre_sweeps, opts.smoother, &obs);
            for (int inner = 0; inner < 2; ++inner) {
                SolverState s2 = restrict_state(s1);
                run_smooth(s2, hier.levels[2], 2, opts.coarsest_sweeps, opts.smoother, &obs);
                apply_correction(s1, s2);
                run_smooth(s1, hier.levels[1], 1,
                           inner == 0 ? opts.pre_sweeps : opts.post_sweeps, opts.smoother, &obs);
            }
        } else {
            run_smooth(s1, hier.levels[1], 1, opts.coarsest_sweeps, opts.smoother, &obs);
        }
        apply_correction(fine, s1);
    }
    run_smooth(fine, hier.levels[0], 0, opts.post_sweeps, opts.smoother, &obs);
    if (finished(fine)) {
        result.converged = true;
        result.reconstruction = fine.x;
        return result;
    }

    // schedule exhausted: continue with safeguarded full-depth V-cycles.
    // Strong anisotropy can make a plain cycle stall or oscillate; a cycle is
    // accepted only when it clearly improves the fine residual with bounded
    // intra-cycle wiggle, otherwise it is rolled back and the smoothing
    // effort doubles. At the effort cap a pure smoothing pass (monotone by
    // construction) keeps guaranteed progress.
    const int depth = static_cast<int>(hier.levels.size());
    const int sweep_cap = 64;
    int pre = opts.pre_sweeps, post = opts.post_sweeps;
    double accepted = residual_norm(fine.r);
    for (int it = 0; it < opts.max_fine_cycles; ++it) {
        SolverState attempt = fine;
        std::vector<ResidualLogEntry> attempt_log;
        VisitObserver attempt_obs;
        attempt_obs.log = &attempt_log;
        attempt_obs.work_units = obs.work_units; // work counts even when rejected
        attempt_obs.visit = obs.visit;
        cycle(hier, attempt, 0, depth, pre, post, opts.coarsest_sweeps, opts.smoother,
              &attempt_obs);
        const double final = residual_norm(attempt.r);
        double first_fine = accepted;
        for (const auto& e : attempt_log)
            if (e.level == 0) {
                first_fine = e.residual;
                break;
            }
        const bool acceptable = final <= 0.999 * accepted && final <= 1.05 * first_fine;
        if (acceptable) {
            fine = std::move(attempt);
            for (auto& e : attempt_log) result.log.push_back(e);
            obs.visit = attempt_obs.visit;
            accepted = final;
        } else if (pre < sweep_cap) {
            pre = std::min(2 * pre, sweep_cap);
            post = std::min(2 * post, sweep_cap);
            obs.visit = attempt_obs.visit;
        } else {
            // smoothing-only fallback: non-increasing residual, always accepted
            run_smooth(fine, hier.levels[0], 0, pre + post, opts.smoother, &obs);
            accepted = residual_norm(fine.r);
        }
        if (accepted <= tol) {
            result.converged = true;
            result.final_residual = accepted;
            result.reconstruction = fine.x;
            return result;
        }
    }
    result.converged = false;
    result.final_residual = accepted;
    result.reconstruction = fine.x;
    return result;
}

SingleGridResult single_grid_solve(const InpaintingProblem& prob, double tol, int max_sweeps,
                                   const SmootherOptions& opts) {
    prob.validate();
    SolverState state = initial_state(prob);
    SingleGridResult result;
    const int chunk = 10;
    smooth(state, prob, 0, opts);
    result.final_residual = residual_norm(state.r);
    while (result.sweeps < max_sweeps && result.final_residual > tol) {
        const int todo = std::min(chunk, max_sweeps - result.sweeps);
        smooth(state, prob, todo, opts);
        result.sweeps += todo;
        result.final_residual = residual_norm(state.r);
    }
    result.converged = result.final_residual <= tol;
    result.reconstruction = state.x;
    return result;
}

} // namespace mg
} // namespace pdenet
