#pragma once

#include "pdenet/image.hpp"

namespace pdenet {
namespace mg {

/// 2x2 cell mean; odd trailing rows/columns mirror the last entry. Dims are
/// ceil-halved, spacing doubles.
Image2D restrict_image(const Image2D& fine);

/// Logical OR over the 2x2 cell: a coarse pixel is known when at least one
/// fine pixel in its cell is known.
Image2D restrict_mask(const Image2D& fine_mask);

/// Nearest-neighbour (replication) interpolation to the given fine shape.
Image2D prolong(const Image2D& coarse, int fine_height, int fine_width);

} // namespace mg
} // namespace pdenet
