#pragma once

#include "pdenet/dataset.hpp"
#include "pdenet/gradients.hpp"
#include "pdenet/metrics.hpp"
#include "pdenet/optimizer.hpp"

#include <cstdint>
#include <functional>

namespace pdenet {

struct TrainConfig {
    double lr = 0.001;
    int max_epochs = 2000;
    int batch_size = 32;
    double beta = 0.0; ///< temporal smoothness weight (TimeDynamic only)
    int restarts = 3;
    int patience = 100; ///< early-stop patience on validation PSNR, in epochs
    int threads = 1;
    std::uint64_t seed = 0;
    double kernel_init_range = 0.1; ///< taps drawn from U[-r, r]
    double lambda_init = 15.0;
    double tau_init = 1.0;
    double alpha_init = 1.0;
};

struct EpochLog {
    int epoch = 0;
    double train_mse = 0.0;
    double val_psnr = 0.0;
};

struct TrainResult {
    NetworkParams params;
    std::vector<EpochLog> log; ///< log of the winning restart
    double best_val_psnr = 0.0;
    int best_restart = -1;
    int nan_aborts = 0;
};

/// Random initialisation following the experiment protocol.
NetworkParams init_params(const NetworkSpec& spec, const TrainConfig& cfg, std::uint64_t seed);

/// Reference step size for the temporal regulariser: 1/blocks for the
/// standard ResNet, the current mean block tau otherwise (held constant
/// during differentiation).
double penalty_tau_ref(const NetworkSpec& spec, const NetworkParams& params);

/// beta * sum_k tau_ref ((theta_k - theta_{k-1})/tau_ref)^2 over kernels,
/// biases and lambda; numerical parameters (tau, alpha) are excluded.
/// Zero for Shared networks.
double temporal_penalty(const NetworkSpec& spec, const NetworkParams& params, double beta,
                        double tau_ref);
void temporal_penalty_grad(const NetworkSpec& spec, const NetworkParams& params, double beta,
                           double tau_ref, GradientSet& into);

/// Mean per-signal PSNR of the network over a set of pairs.
double evaluate_psnr(const NetworkSpec& spec, const NetworkParams& params,
                     const SignalPairs& pairs, int threads = 1);

/// Full training run: Adam on mean MSE + temporal penalty, projection after
/// every step, per-epoch logging, early stopping, best-of-restarts selection
/// by validation PSNR. Bit-reproducible for fixed (seed, config, threads).
TrainResult train(const NetworkSpec& spec, const SplitDataset& data, const TrainConfig& cfg,
                  const std::function<void(int, const EpochLog&)>& on_epoch = {});

/// Classical explicit-diffusion baseline with the fixed kernel (0,-1,1)/h:
/// grid search over (lambda, total time) on the validation split, scored on
/// the test split.
struct BaselineResult {
    double lambda = 0.0;
    double total_time = 0.0;
    int steps = 0;
    double val_psnr = 0.0;
    double test_psnr = 0.0;
};
BaselineResult classical_baseline(const SplitDataset& data, FluxKind kind,
                                  const std::vector<double>& lambda_grid,
                                  const std::vector<double>& time_grid, int threads = 1);

/// The lambda / diffusion-time grids used by the benchmark harness.
std::vector<double> default_lambda_grid(FluxKind kind);
std::vector<double> default_time_grid();

} // namespace pdenet
