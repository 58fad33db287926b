#pragma once

#include "pdenet/image.hpp"

namespace pdenet {
namespace mg {

/// Per-pixel symmetric 2x2 diffusion tensor [[a, b], [b, c]].
struct TensorField {
    Image2D a, b, c;

    int height() const { return a.height(); }
    int width() const { return a.width(); }

    static TensorField identity(int height, int width, double h = 1.0);
};

/// Separable Gaussian smoothing, kernel sampled and truncated at 3 sigma,
/// renormalised, mirrored boundaries. sigma is in pixels; sigma <= 0 returns
/// the input unchanged.
Image2D gaussian_smooth(const Image2D& u, double sigma);

/// Edge-enhancing diffusion tensor D = g(grad(u_sigma) grad(u_sigma)^T) with
/// the Charbonnier diffusivity: eigenvalues g(|grad|^2) across and 1 along
/// image structures. sigma is in pixels of u's grid.
TensorField eed_tensor(const Image2D& u, double sigma, double lambda);

} // namespace mg
} // namespace pdenet
