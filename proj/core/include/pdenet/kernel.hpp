#pragma once

#include <array>
#include <span>
#include <vector>

namespace pdenet {

/// Bank of width-3 convolution kernels between channel groups.
///
/// taps are stored (out_channel, in_channel, offset) with offsets -1, 0, +1.
/// tap(co, ci, 0) multiplies u_{i-1}, tap(co, ci, 2) multiplies u_{i+1}.
/// Width is fixed to 3; wider banks are rejected at construction.
class KernelBank {
public:
    KernelBank() = default;
    KernelBank(int out_channels, int in_channels, double h = 1.0);

    static KernelBank from_taps(int out_channels, int in_channels,
                                std::span<const double> taps, double h = 1.0);
    /// C x C bank acting as the identity.
    static KernelBank identity(int channels, double h = 1.0);
    /// Single-channel bank with the given three taps.
    static KernelBank single(std::array<double, 3> taps, double h = 1.0);

    int out_channels() const { return out_channels_; }
    int in_channels() const { return in_channels_; }
    bool square() const { return out_channels_ == in_channels_; }
    double spacing() const { return h_; }

    double& tap(int co, int ci, int k) {
        return taps_[(static_cast<size_t>(co) * in_channels_ + ci) * 3 + k];
    }
    double tap(int co, int ci, int k) const {
        return taps_[(static_cast<size_t>(co) * in_channels_ + ci) * 3 + k];
    }

    std::vector<double>& taps() { return taps_; }
    const std::vector<double>& taps() const { return taps_; }

    bool all_zero() const;
    bool all_finite() const;

private:
    std::vector<double> taps_;
    int out_channels_ = 0;
    int in_channels_ = 0;
    double h_ = 1.0;
};

} // namespace pdenet
