#include "pdenet/mg/transfer.hpp"
#include "pdenet/errors.hpp"

#include <algorithm>

namespace pdenet {
namespace mg {

Image2D restrict_image(const Image2D& fine) {
    const int ch = (fine.height() + 1) / 2;
    const int cw = (fine.width() + 1) / 2;
    Image2D coarse(ch, cw, fine.spacing() * 2.0);
    for (int y = 0; y < ch; ++y) {
        const int y0 = 2 * y, y1 = std::min(2 * y + 1, fine.height() - 1);
        for (int x = 0; x < cw; ++x) {
            const int x0 = 2 * x, x1 = std::min(2 * x + 1, fine.width() - 1);
            coarse.at(y, x) =
                0.25 * (fine.at(y0, x0) + fine.at(y0, x1) + fine.at(y1, x0) + fine.at(y1, x1));
        }
    }
    return coarse;
}

Image2D restrict_mask(const Image2D& fine_mask) {
    const int ch = (fine_mask.height() + 1) / 2;
    const int cw = (fine_mask.width() + 1) / 2;
    Image2D coarse(ch, cw, fine_mask.spacing() * 2.0);
    for (int y = 0; y < ch; ++y) {
        const int y0 = 2 * y, y1 = std::min(2 * y + 1, fine_mask.height() - 1);
        for (int x = 0; x < cw; ++x) {
            const int x0 = 2 * x, x1 = std::min(2 * x + 1, fine_mask.width() - 1);
            const bool known = fine_mask.at(y0, x0) != 0.0 || fine_mask.at(y0, x1) != 0.0 ||
                               fine_mask.at(y1, x0) != 0.0 || fine_mask.at(y1, x1) != 0.0;
            coarse.at(y, x) = known ? 1.0 : 0.0;
        }
    }
    return coarse;
}

Image2D prolong(const Image2D& coarse, int fine_height, int fine_width) {
    if ((fine_height + 1) / 2 != coarse.height() || (fine_width + 1) / 2 != coarse.width())
        throw DimensionError("prolong: fine shape is not the ceil-double of the coarse shape");
    Image2D fine(fine_height, fine_width, coarse.spacing() / 2.0);
    for (int y = 0; y < fine_height; ++y)
        for (int x = 0; x < fine_width; ++x) fine.at(y, x) = coarse.at(y / 2, x / 2);
    return fine;
}

} // namespace mg
} // namespace pdenet
