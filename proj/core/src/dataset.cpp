#include "pdenet/dataset.hpp"
#include "pdenet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

namespace pdenet {

namespace {

SignalPairs generate_pairs(std::mt19937_64& rng, int count, const DatasetConfig& cfg) {
    SignalPairs pairs;
    pairs.clean.reserve(count);
    pairs.noisy.reserve(count);
    const int min_len = std::max(2, static_cast<int>(std::ceil(cfg.seg_min_frac * cfg.length)));
    const int max_len = std::max(min_len, static_cast<int>(std::floor(cfg.seg_max_frac * cfg.length)));
    std::uniform_int_distribution<int> seg_len(min_len, max_len);
    std::uniform_real_distribution<double> value(cfg.value_lo, cfg.value_hi);
    std::normal_distribution<double> noise(0.0, 1.0);

    for (int s = 0; s < count; ++s) {
        SignalBundle clean(1, cfg.length);
        int pos = 0;
        while (pos < cfg.length) {
            const int len = std::min(seg_len(rng), cfg.length - pos);
            // fresh start value at every boundary creates the jump
            const double a = value(rng);
            const double b = value(rng);
            for (int i = 0; i < len; ++i)
                clean.at(0, pos + i) = len == 1 ? a : a + (b - a) * i / (len - 1);
            pos += len;
        }
        SignalBundle noisy = clean;
        if (cfg.noise_sigma > 0.0)
            for (double& v : noisy.data()) v += cfg.noise_sigma * noise(rng);
        pairs.clean.push_back(std::move(clean));
        pairs.noisy.push_back(std::move(noisy));
    }
    return pairs;
}

} // namespace

SplitDataset generate_dataset(const DatasetConfig& cfg) {
    if (cfg.length < 2) throw ConfigError("generate_dataset: length must be >= 2");
    if (cfg.seg_min_frac <= 0.0 || cfg.seg_max_frac > 1.0 || cfg.seg_min_frac > cfg.seg_max_frac)
        throw ConfigError("generate_dataset: segment fractions out of range");
    std::mt19937_64 rng(cfg.seed);
    SplitDataset data;
    data.train = generate_pairs(rng, cfg.n_train, cfg);
    data.val = generate_pairs(rng, cfg.n_val, cfg);
    data.test = generate_pairs(rng, cfg.n_test, cfg);
    return data;
}

void save_dataset(const std::string& directory, const SplitDataset& data) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    const fs::path dir(directory);
    write_signals_csv((dir / "train.csv").string(), data.train.noisy);
    write_signals_csv((dir / "train_clean.csv").string(), data.train.clean);
    write_signals_csv((dir / "val.csv").string(), data.val.noisy);
    write_signals_csv((dir / "val_clean.csv").string(), data.val.clean);
    write_signals_csv((dir / "test.csv").string(), data.test.noisy);
    write_signals_csv((dir / "test_clean.csv").string(), data.test.clean);
}

SplitDataset load_dataset(const std::string& directory) {
    namespace fs = std::filesystem;
    const fs::path dir(directory);
    SplitDataset data;
    data.train.noisy = read_signals_csv((dir / "train.csv").string());
    data.train.clean = read_signals_csv((dir / "train_clean.csv").string());
    data.val.noisy = read_signals_csv((dir / "val.csv").string());
    data.val.clean = read_signals_csv((dir / "val_clean.csv").string());
    data.test.noisy = read_signals_csv((dir / "test.csv").string());
    data.test.clean = read_signals_csv((dir / "test_clean.csv").string());
    if (data.train.noisy.size() != data.train.clean.size() ||
        data.val.noisy.size() != data.val.clean.size() ||
        data.test.noisy.size() != data.test.clean.size())
        throw IoError("dataset in '" + directory + "' has mismatched clean/noisy counts");
    return data;
}

} // namespace pdenet
