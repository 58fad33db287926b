#include "pdenet/kernel.hpp"
#include "pdenet/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pdenet {

KernelBank::KernelBank(int out_channels, int in_channels, double h)
    : taps_(static_cast<size_t>(out_channels) * in_channels * 3, 0.0),
      out_channels_(out_channels),
      in_channels_(in_channels),
      h_(h) {
    if (out_channels < 1 || in_channels < 1)
        throw DimensionError("KernelBank: channel counts must be >= 1");
    if (!(h > 0.0)) throw DimensionError("KernelBank: grid spacing must be positive");
}

KernelBank KernelBank::from_taps(int out_channels, int in_channels,
                                 std::span<const double> taps, double h) {
    KernelBank k(out_channels, in_channels, h);
    if (taps.size() != k.taps_.size())
        throw DimensionError("KernelBank: expected exactly 3 taps per channel pair");
    std::copy(taps.begin(), taps.end(), k.taps_.begin());
    return k;
}

KernelBank KernelBank::identity(int channels, double h) {
    KernelBank k(channels, channels, h);
    for (int c = 0; c < channels; ++c) k.tap(c, c, 1) = 1.0;
    return k;
}

KernelBank KernelBank::single(std::array<double, 3> taps, double h) {
    return from_taps(1, 1, taps, h);
}

bool KernelBank::all_zero() const {
    return std::all_of(taps_.begin(), taps_.end(), [](double t) { return t == 0.0; });
}

bool KernelBank::all_finite() const {
    return std::all_of(taps_.begin(), taps_.end(), [](double t) { return std::isfinite(t); });
}

} // namespace pdenet
