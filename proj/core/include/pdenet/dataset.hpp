#pragma once

#include "pdenet/signal.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pdenet {

/// Synthetic piecewise-affine 1D denoising benchmark.
struct DatasetConfig {
    int n_train = 10000;
    int n_val = 1000;
    int n_test = 1000;
    int length = 256;
    double noise_sigma = 10.0;
    double value_lo = 0.0;
    double value_hi = 255.0;
    double seg_min_frac = 0.1;
    double seg_max_frac = 0.5;
    std::uint64_t seed = 0;
};

struct SignalPairs {
    std::vector<SignalBundle> clean;
    std::vector<SignalBundle> noisy;
};

struct SplitDataset {
    SignalPairs train, val, test;
};

/// Deterministic given the seed. Clean signals are piecewise affine with
/// jumps between segments; values in [value_lo, value_hi]; segment lengths
/// uniform in [seg_min_frac, seg_max_frac] of the signal length. Gaussian
/// noise is added without clipping.
SplitDataset generate_dataset(const DatasetConfig& cfg);

/// Writes train/val/test noisy CSVs plus matching *_clean.csv files.
void save_dataset(const std::string& directory, const SplitDataset& data);
SplitDataset load_dataset(const std::string& directory);

} // namespace pdenet
