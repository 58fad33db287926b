#include "pdenet/mg/problem.hpp"
#include "pdenet/errors.hpp"
#include "pdenet/mg/transfer.hpp"

#include <cmath>

namespace pdenet {
namespace mg {

void InpaintingProblem::validate() const {
    if (!f.same_shape(mask)) throw DimensionError("inpainting problem: image/mask shape mismatch");
    if (f.height() < 2 || f.width() < 2)
        throw DimensionError("inpainting problem: needs at least a 2x2 grid");
    bool any_known = false;
    for (double v : mask.data()) {
        if (v != 0.0 && v != 1.0)
            throw ConfigError("inpainting problem: mask entries must be 0 or 1");
        any_known = any_known || v == 1.0;
    }
    if (!any_known) throw ConfigError("inpainting problem: needs at least one known pixel");
    if (!(lambda > 0.0)) throw ConfigError("inpainting problem: lambda must be positive");
    if (sigma < 0.0) throw ConfigError("inpainting problem: sigma must be nonnegative");
}

SolverState SolverState::zeros(int height, int width, double h) {
    SolverState s;
    s.x = Image2D::zeros(height, width, h);
    s.y = Image2D::zeros(height, width, h);
    s.b = Image2D::zeros(height, width, h);
    s.r = Image2D::zeros(height, width, h);
    return s;
}

SolverState initial_state(const InpaintingProblem& prob) {
    SolverState s = SolverState::zeros(prob.f.height(), prob.f.width(), prob.f.spacing());
    for (size_t i = 0; i < s.x.data().size(); ++i) {
        const double known = prob.mask.data()[i] * prob.f.data()[i];
        s.x.data()[i] = known;
        s.b.data()[i] = known;
    }
    return s;
}

TensorField problem_tensor(const InpaintingProblem& prob, const Image2D& iterate) {
    if (prob.frozen_tensor) return *prob.frozen_tensor;
    return eed_tensor(iterate, prob.sigma_pixels(), prob.lambda);
}

namespace {

inline bool on_ring(int y, int x, int h, int w) {
    return y == 0 || x == 0 || y == h - 1 || x == w - 1;
}

} // namespace

Image2D apply_operator(const InpaintingProblem& prob, const Image2D& u, const TensorField& tensor) {
    const int hgt = u.height(), wid = u.width();
    if (!u.same_shape(prob.mask)) throw DimensionError("apply_operator: shape mismatch");
    const double inv_h2 = 1.0 / (u.spacing() * u.spacing());
    Image2D out(hgt, wid, u.spacing());

    auto cl = [](int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
    auto bval = [&](int y, int x) {
        return on_ring(y, x, hgt, wid) ? 0.0 : tensor.b.at(y, x);
    };

    for (int y = 0; y < hgt; ++y) {
        for (int x = 0; x < wid; ++x) {
            const double c = prob.mask.at(y, x);
            double div = 0.0;
            if (c != 1.0) {
                const double uc = u.at(y, x);
                const double a0 = tensor.a.at(y, x), c0 = tensor.c.at(y, x);
                // axial fluxes with half-point conductivities; the mirrored
                // boundary zeroes the flux across the image edge
                if (x + 1 < wid)
                    div += 0.5 * (tensor.a.at(y, x + 1) + a0) * (u.at(y, x + 1) - uc) * inv_h2;
                if (x > 0)
                    div -= 0.5 * (tensor.a.at(y, x - 1) + a0) * (uc - u.at(y, x - 1)) * inv_h2;
                if (y + 1 < hgt)
                    div += 0.5 * (tensor.c.at(y + 1, x) + c0) * (u.at(y + 1, x) - uc) * inv_h2;
                if (y > 0)
                    div -= 0.5 * (tensor.c.at(y - 1, x) + c0) * (uc - u.at(y - 1, x)) * inv_h2;
                // mixed terms, central differences; b vanishes on the ring so
                // no clamped index is ever multiplied by a nonzero weight
                const double bxp = bval(y, cl(x + 1, wid));
                const double bxm = bval(y, cl(x - 1, wid));
                const double byp = bval(cl(y + 1, hgt), x);
                const double bym = bval(cl(y - 1, hgt), x);
                if (bxp != 0.0)
                    div += bxp * (u.at(y + 1, x + 1) - u.at(y - 1, x + 1)) * 0.25 * inv_h2;
                if (bxm != 0.0)
                    div -= bxm * (u.at(y + 1, x - 1) - u.at(y - 1, x - 1)) * 0.25 * inv_h2;
                if (byp != 0.0)
                    div += byp * (u.at(y + 1, x + 1) - u.at(y + 1, x - 1)) * 0.25 * inv_h2;
                if (bym != 0.0)
                    div -= bym * (u.at(y - 1, x + 1) - u.at(y - 1, x - 1)) * 0.25 * inv_h2;
            }
            out.at(y, x) = -(1.0 - c) * div + c * u.at(y, x);
        }
    }
    return out;
}

Image2D operator_diagonal(const InpaintingProblem& prob, const TensorField& tensor) {
    const int hgt = prob.mask.height(), wid = prob.mask.width();
    const double inv_h2 = 1.0 / (prob.f.spacing() * prob.f.spacing());
    Image2D diag(hgt, wid, prob.f.spacing());
    for (int y = 0; y < hgt; ++y) {
        for (int x = 0; x < wid; ++x) {
            const double c = prob.mask.at(y, x);
            double d = c;
            if (c != 1.0) {
                const double a0 = tensor.a.at(y, x), c0 = tensor.c.at(y, x);
                double s = 0.0;
                if (x + 1 < wid) s += 0.5 * (tensor.a.at(y, x + 1) + a0);
                if (x > 0) s += 0.5 * (tensor.a.at(y, x - 1) + a0);
                if (y + 1 < hgt) s += 0.5 * (tensor.c.at(y + 1, x) + c0);
                if (y > 0) s += 0.5 * (tensor.c.at(y - 1, x) + c0);
                d += (1.0 - c) * s * inv_h2;
            }
            if (d <= 0.0)
                throw NumericalError("operator_diagonal: nonpositive diagonal entry");
            diag.at(y, x) = d;
        }
    }
    return diag;
}

Image2D eed_residual(const InpaintingProblem& prob, const Image2D& u, const Image2D& y,
                     const Image2D& b) {
    const TensorField tu = problem_tensor(prob, u);
    Image2D au = apply_operator(prob, u, tu);
    const TensorField ty = problem_tensor(prob, y);
    Image2D ay = apply_operator(prob, y, ty);
    Image2D r(u.height(), u.width(), u.spacing());
    for (size_t i = 0; i < r.data().size(); ++i)
        r.data()[i] = ay.data()[i] + b.data()[i] - au.data()[i];
    return r;
}

double residual_norm(const Image2D& r) { return r.mean_abs(); }

GridHierarchy build_hierarchy(const InpaintingProblem& prob, int levels) {
    prob.validate();
    GridHierarchy hier;
    hier.levels.push_back(prob);
    for (int l = 1; l < levels; ++l) {
        const InpaintingProblem& fine = hier.levels.back();
        if (fine.f.height() < 4 || fine.f.width() < 4) break;
        InpaintingProblem coarse;
        coarse.f = restrict_image(fine.f);
        coarse.mask = restrict_mask(fine.mask);
        coarse.lambda = fine.lambda;
        coarse.sigma = fine.sigma;
        if (fine.frozen_tensor) {
            TensorField t;
            t.a = restrict_image(fine.frozen_tensor->a);
            t.b = restrict_image(fine.frozen_tensor->b);
            t.c = restrict_image(fine.frozen_tensor->c);
            coarse.frozen_tensor = std::move(t);
        }
        hier.levels.push_back(std::move(coarse));
    }
    return hier;
}

} // namespace mg
} // namespace pdenet
