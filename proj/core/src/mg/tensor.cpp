#include "pdenet/mg/tensor.hpp"
#include "pdenet/errors.hpp"
#include "pdenet/flux.hpp"

#include <cmath>
#include <vector>

namespace pdenet {
namespace mg {

TensorField TensorField::identity(int height, int width, double h) {
    TensorField t;
    t.a = Image2D::constant(height, width, 1.0, h);
    t.b = Image2D::zeros(height, width, h);
    t.c = Image2D::constant(height, width, 1.0, h);
    return t;
}

Image2D gaussian_smooth(const Image2D& u, double sigma) {
    if (sigma <= 0.0) return u;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
        sum += kernel[k + radius];
    }
    for (double& v : kernel) v /= sum;

    const int hgt = u.height(), wid = u.width();
    auto clampi = [](int i, int n) { return i < 0 ? -i - 1 : (i >= n ? 2 * n - 1 - i : i); };

    Image2D tmp(hgt, wid, u.spacing());
    for (int y = 0; y < hgt; ++y)
        for (int x = 0; x < wid; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) s += kernel[k + radius] * u.at(y, clampi(x + k, wid));
            tmp.at(y, x) = s;
        }
    Image2D out(hgt, wid, u.spacing());
    for (int y = 0; y < hgt; ++y)
        for (int x = 0; x < wid; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) s += kernel[k + radius] * tmp.at(clampi(y + k, hgt), x);
            out.at(y, x) = s;
        }
    return out;
}

TensorField eed_tensor(const Image2D& u, double sigma, double lambda) {
    const Image2D smoothed = gaussian_smooth(u, sigma);
    const int hgt = u.height(), wid = u.width();
    const double inv2h = 1.0 / (2.0 * u.spacing());
    const FluxFunction g{FluxKind::Charbonnier, lambda};

    TensorField t;
    t.a = Image2D(hgt, wid, u.spacing());
    t.b = Image2D(hgt, wid, u.spacing());
    t.c = Image2D(hgt, wid, u.spacing());

    auto cl = [](int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
    for (int y = 0; y < hgt; ++y) {
        for (int x = 0; x < wid; ++x) {
            const double gx =
                (smoothed.at(y, cl(x + 1, wid)) - smoothed.at(y, cl(x - 1, wid))) * inv2h;
            const double gy =
                (smoothed.at(cl(y + 1, hgt), x) - smoothed.at(cl(y - 1, hgt), x)) * inv2h;
            const double n2 = gx * gx + gy * gy;
            if (n2 < 1e-300) {
                t.a.at(y, x) = 1.0;
                t.b.at(y, x) = 0.0;
                t.c.at(y, x) = 1.0;
                continue;
            }
            // D = I + (g(n2) - 1)/n2 * grad grad^T: eigenvalue g(n2) across
            // the structure, 1 along it
            const double w = (diffusivity_eval(g, n2) - 1.0) / n2;
            t.a.at(y, x) = 1.0 + w * gx * gx;
            t.b.at(y, x) = w * gx * gy;
            t.c.at(y, x) = 1.0 + w * gy * gy;
        }
    }
    return t;
}

} // namespace mg
} // namespace pdenet
