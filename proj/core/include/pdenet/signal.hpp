#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pdenet {

/// Multi-channel 1D signal sampled with grid spacing h.
///
/// Storage is channel-major: entry (c, i) lives at data()[c * length() + i].
/// Kernels are trained on the raw grid, so h is carried along but never
/// re-applied to kernel taps.
class SignalBundle {
public:
    SignalBundle() = default;
    SignalBundle(int channels, int length, double h = 1.0);

    static SignalBundle zeros(int channels, int length, double h = 1.0);
    /// Single-channel bundle from raw samples.
    static SignalBundle from_samples(std::span<const double> samples, double h = 1.0);

    int channels() const { return channels_; }
    int length() const { return length_; }
    double spacing() const { return h_; }

    double& at(int c, int i) { return data_[static_cast<size_t>(c) * length_ + i]; }
    double at(int c, int i) const { return data_[static_cast<size_t>(c) * length_ + i]; }

    std::span<double> channel(int c) {
        return {data_.data() + static_cast<size_t>(c) * length_, static_cast<size_t>(length_)};
    }
    std::span<const double> channel(int c) const {
        return {data_.data() + static_cast<size_t>(c) * length_, static_cast<size_t>(length_)};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(const SignalBundle& other) const {
        return channels_ == other.channels_ && length_ == other.length_;
    }

    /// Euclidean norm over all channels.
    double norm() const;
    /// Sum of all entries (mean-preservation checks).
    double sum() const;
    bool all_finite() const;
    /// Throws NumericalError when a non-finite entry is present.
    void require_finite(const char* context) const;

private:
    std::vector<double> data_;
    int channels_ = 0;
    int length_ = 0;
    double h_ = 1.0;
};

/// Lift a single-channel signal into `channels` identical channels.
SignalBundle lift_channels(const SignalBundle& u, int channels);
/// Average all channels into a single-channel signal.
SignalBundle average_channels(const SignalBundle& u);

/// CSV serialization: one signal per line, channel-major, comma separated,
/// decimal-17 round-trip formatting.
void write_signals_csv(const std::string& path, const std::vector<SignalBundle>& signals);
std::vector<SignalBundle> read_signals_csv(const std::string& path, int channels = 1);

/// decimal-17 formatting used for every floating point value we write.
std::string format_double(double v);

} // namespace pdenet
