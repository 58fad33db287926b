#pragma once

#include "pdenet/signal.hpp"

namespace pdenet {

/// Mean squared difference over all entries.
double mse(const SignalBundle& a, const SignalBundle& b);

/// 10 log10(255^2 / mse); +inf sentinel when mse = 0.
double psnr(const SignalBundle& a, const SignalBundle& b);
double psnr_from_mse(double mse_value);

} // namespace pdenet
