#include "pdenet/metrics.hpp"
#include "pdenet/errors.hpp"

#include <cmath>
#include <limits>

namespace pdenet {

double mse(const SignalBundle& a, const SignalBundle& b) {
    if (!a.same_shape(b)) throw DimensionError("mse: shape mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.data().size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        s += d * d;
    }
    return s / static_cast<double>(a.data().size());
}

double psnr_from_mse(double mse_value) {
    if (mse_value <= 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / mse_value);
}

double psnr(const SignalBundle& a, const SignalBundle& b) { return psnr_from_mse(mse(a, b)); }

} // namespace pdenet
