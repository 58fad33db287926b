#include "pdenet/signal.hpp"
#include "pdenet/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pdenet {

SignalBundle::SignalBundle(int channels, int length, double h)
    : data_(static_cast<size_t>(channels) * length, 0.0),
      channels_(channels),
      length_(length),
      h_(h) {
    if (channels < 1) throw DimensionError("SignalBundle: channels must be >= 1");
    if (length < 2) throw DimensionError("SignalBundle: length must be >= 2");
    if (!(h > 0.0)) throw DimensionError("SignalBundle: grid spacing must be positive");
}

SignalBundle SignalBundle::zeros(int channels, int length, double h) {
    return SignalBundle(channels, length, h);
}

SignalBundle SignalBundle::from_samples(std::span<const double> samples, double h) {
    SignalBundle u(1, static_cast<int>(samples.size()), h);
    std::copy(samples.begin(), samples.end(), u.data_.begin());
    return u;
}

double SignalBundle::norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double SignalBundle::sum() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
}

bool SignalBundle::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void SignalBundle::require_finite(const char* context) const {
    if (!all_finite())
        throw NumericalError(std::string(context) + ": non-finite value in signal");
}

SignalBundle lift_channels(const SignalBundle& u, int channels) {
    if (u.channels() != 1)
        throw DimensionError("lift_channels: expected a single-channel signal");
    SignalBundle out(channels, u.length(), u.spacing());
    for (int c = 0; c < channels; ++c)
        for (int i = 0; i < u.length(); ++i) out.at(c, i) = u.at(0, i);
    return out;
}

SignalBundle average_channels(const SignalBundle& u) {
    SignalBundle out(1, u.length(), u.spacing());
    const double inv = 1.0 / u.channels();
    for (int i = 0; i < u.length(); ++i) {
        double s = 0.0;
        for (int c = 0; c < u.channels(); ++c) s += u.at(c, i);
        out.at(0, i) = s * inv;
    }
    return out;
}

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_signals_csv(const std::string& path, const std::vector<SignalBundle>& signals) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const auto& s : signals) {
        for (size_t k = 0; k < s.data().size(); ++k) {
            if (k) out << ',';
            out << format_double(s.data()[k]);
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<SignalBundle> read_signals_csv(const std::string& path, int channels) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::vector<SignalBundle> signals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> values;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                values.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw IoError("malformed CSV value '" + tok + "' in " + path);
            }
        }
        if (values.empty() || values.size() % channels != 0)
            throw IoError("CSV row size not divisible by channel count in " + path);
        const int n = static_cast<int>(values.size()) / channels;
        SignalBundle u(channels, n);
        u.data() = values;
        signals.push_back(std::move(u));
    }
    return signals;
}

} // namespace pdenet
