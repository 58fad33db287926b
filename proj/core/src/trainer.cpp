#include "pdenet/trainer.hpp"
#include "pdenet/errors.hpp"
#include "pdenet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>

namespace pdenet {

NetworkParams init_params(const NetworkSpec& spec, const TrainConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> taps(-cfg.kernel_init_range, cfg.kernel_init_range);
    NetworkParams params = make_params(spec);
    for (auto& b : params.blocks) {
        for (double& t : b.kernel.taps()) t = taps(rng);
        if (b.outer_kernel)
            for (double& t : b.outer_kernel->taps()) t = taps(rng);
        b.lambda = cfg.lambda_init;
        b.tau = cfg.tau_init;
        b.alpha = cfg.alpha_init;
    }
    std::fill(params.fsi_alphas.begin(), params.fsi_alphas.end(), cfg.alpha_init);
    return params;
}

double penalty_tau_ref(const NetworkSpec& spec, const NetworkParams& params) {
    if (spec.arch == Architecture::ResNet) return 1.0 / spec.blocks;
    double mean = 0.0;
    for (const auto& b : params.blocks) mean += b.tau;
    mean /= static_cast<double>(params.blocks.size());
    return std::max(mean, 1e-8);
}

namespace {

bool penalised(ParamField f) {
    switch (f) {
        case ParamField::Kernel:
        case ParamField::OuterKernel:
        case ParamField::BiasIn:
        case ParamField::BiasOut:
        case ParamField::Lambda: return true;
        default: return false;
    }
}

double slot_value(const NetworkParams& params, int block, ParamField field, int offset) {
    auto& p = const_cast<NetworkParams&>(params);
    ParamSlot s{block, field, offset};
    return param_ref(p, s);
}

} // namespace

double temporal_penalty(const NetworkSpec& spec, const NetworkParams& params, double beta,
                        double tau_ref) {
    if (spec.sharing == Sharing::Shared || params.blocks.size() < 2 || beta == 0.0) return 0.0;
    double sum = 0.0;
    auto layout = parameter_layout(spec, params);
    for (const auto& slot : layout) {
        if (slot.block != 0 || !penalised(slot.field)) continue;
        for (size_t k = 1; k < params.blocks.size(); ++k) {
            const double d = slot_value(params, static_cast<int>(k), slot.field, slot.offset) -
                             slot_value(params, static_cast<int>(k) - 1, slot.field, slot.offset);
            sum += d * d;
        }
    }
    return beta / tau_ref * sum;
}

void temporal_penalty_grad(const NetworkSpec& spec, const NetworkParams& params, double beta,
                           double tau_ref, GradientSet& into) {
    if (spec.sharing == Sharing::Shared || params.blocks.size() < 2 || beta == 0.0) return;
    const double w = 2.0 * beta / tau_ref;
    auto layout = parameter_layout(spec, params);
    const int nb = static_cast<int>(params.blocks.size());
    for (const auto& slot : layout) {
        if (slot.block != 0 || !penalised(slot.field)) continue;
        for (int k = 0; k < nb; ++k) {
            double g = 0.0;
            const double here = slot_value(params, k, slot.field, slot.offset);
            if (k > 0) g += here - slot_value(params, k - 1, slot.field, slot.offset);
            if (k + 1 < nb) g -= slot_value(params, k + 1, slot.field, slot.offset) - here;
            ParamSlot target{k, slot.field, slot.offset};
            grad_ref(into, target) += w * g;
        }
    }
}

double evaluate_psnr(const NetworkSpec& spec, const NetworkParams& params,
                     const SignalPairs& pairs, int threads) {
    const int count = static_cast<int>(pairs.noisy.size());
    if (count == 0) return 0.0;
    std::vector<double> chunk_sums(static_cast<size_t>(std::max(1, std::min(threads, count))), 0.0);
    parallel_chunks(count, threads, [&](int chunk, int begin, int end) {
        double s = 0.0;
        for (int i = begin; i < end; ++i) {
            SignalBundle out = network_forward(spec, params, pairs.noisy[i]);
            s += psnr(out, pairs.clean[i]);
        }
        chunk_sums[chunk] = s;
    });
    double total = 0.0;
    for (double s : chunk_sums) total += s;
    return total / count;
}

namespace {

// Tracks ||K||^2 across optimizer steps with warm-started power iterations.
// The kernel moves little per step, so a handful of iterations keeps the
// estimate at the accuracy the projection needs.
class NormTracker {
public:
    void resize(size_t blocks) { vectors_.resize(blocks); }

    double norm_sq(const KernelBank& k, int n, size_t block) {
        if (k.all_zero()) return 0.0;
        auto& v = vectors_[block];
        const size_t dim = static_cast<size_t>(k.in_channels()) * n;
        if (v.data().size() != dim) {
            std::mt19937_64 rng(0xabcdef01u + block);
            std::uniform_real_distribution<double> d(-1.0, 1.0);
            v = SignalBundle(k.in_channels(), n);
            for (double& x : v.data()) x = d(rng);
            const double nn = v.norm();
            for (double& x : v.data()) x /= nn;
        }
        double est = 0.0, prev = -1.0;
        for (int it = 0; it < 200; ++it) {
            SignalBundle y = conv_adjoint_apply(conv_apply(v, k), k);
            const double yn = y.norm();
            if (yn == 0.0) return 0.0;
            est = yn;
            for (size_t i = 0; i < y.data().size(); ++i) v.data()[i] = y.data()[i] / yn;
            if (prev >= 0.0 && std::abs(est - prev) <= 1e-11 * est) break;
            prev = est;
        }
        return est;
    }

private:
    std::vector<SignalBundle> vectors_;
};

void project_with_hints(const NetworkSpec& spec, NetworkParams& params, int n,
                        NormTracker& tracker) {
    const double lip = lipschitz_constant({spec.flux, 1.0});
    for (size_t i = 0; i < params.blocks.size(); ++i) {
        auto& b = params.blocks[i];
        b.lambda = std::max(b.lambda, 1e-4);
        if (spec.arch == Architecture::ResNet) continue;
        double norm_sq;
        if (spec.stability == StabilityMode::GershgorinAPriori) {
            const double bound = apriori_norm_bound(b.kernel);
            norm_sq = bound * bound;
        } else {
            norm_sq = tracker.norm_sq(b.kernel, n, i);
        }
        if (norm_sq > 0.0) {
            const double tau_max = 2.0 / (lip * norm_sq);
            b.tau = std::clamp(b.tau, 0.0, tau_max);
            if (spec.arch == Architecture::DFNet)
                b.alpha = std::max(b.alpha, lip * norm_sq / 4.0);
        }
    }
    for (double& a : params.fsi_alphas) a = std::clamp(a, 0.0, 2.0);
}

struct BatchResult {
    GradientSet grads;
    double mse_sum = 0.0;
};

} // namespace

TrainResult train(const NetworkSpec& spec, const SplitDataset& data, const TrainConfig& cfg,
                  const std::function<void(int, const EpochLog&)>& on_epoch) {
    if (data.train.noisy.empty()) throw ConfigError("train: empty training set");
    const int n = data.train.noisy.front().length();
    const int train_count = static_cast<int>(data.train.noisy.size());
    const int batch_size = std::max(1, std::min(cfg.batch_size, train_count));

    TrainResult best;
    best.best_val_psnr = -std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < std::max(1, cfg.restarts); ++restart) {
        NetworkParams params = init_params(spec, cfg, cfg.seed * 1000003ULL + restart);
        NormTracker tracker;
        tracker.resize(params.blocks.size());
        project_with_hints(spec, params, n, tracker);

        AdamState adam = make_adam_state(parameter_layout(spec, params).size());
        std::mt19937_64 shuffle_rng(cfg.seed * 7919ULL + restart + 1);
        std::vector<int> order(train_count);
        std::iota(order.begin(), order.end(), 0);

        std::vector<EpochLog> log;
        NetworkParams best_params = params;
        double best_val = -std::numeric_limits<double>::infinity();
        int since_best = 0;
        bool aborted = false;

        for (int epoch = 0; epoch < cfg.max_epochs && !aborted; ++epoch) {
            std::shuffle(order.begin(), order.end(), shuffle_rng);
            double epoch_mse = 0.0;
            int batches = 0;

            for (int start = 0; start < train_count; start += batch_size) {
                const int end = std::min(start + batch_size, train_count);
                const int count = end - start;

                const int workers = std::max(1, std::min(cfg.threads, count));
                std::vector<BatchResult> partial(workers);
                bool failed = false;
                std::mutex fail_mutex;
                parallel_chunks(count, cfg.threads, [&](int chunk, int begin, int stop) {
                    try {
                        BatchResult local;
                        local.grads = make_gradients(spec, params);
                        for (int j = begin; j < stop; ++j) {
                            const int idx = order[start + j];
                            ForwardTape tape;
                            SignalBundle out =
                                network_forward(spec, params, data.train.noisy[idx], &tape);
                            const SignalBundle& clean = data.train.clean[idx];
                            local.mse_sum += mse(out, clean);
                            SignalBundle upstream(1, out.length());
                            const double scale_up = 2.0 / out.length();
                            for (int i = 0; i < out.length(); ++i)
                                upstream.at(0, i) = scale_up * (out.at(0, i) - clean.at(0, i));
                            GradientSet g = backward(spec, params, tape, upstream);
                            accumulate(local.grads, g);
                        }
                        partial[chunk] = std::move(local);
                    } catch (const NumericalError&) {
                        std::lock_guard<std::mutex> lock(fail_mutex);
                        failed = true;
                    }
                });
                if (failed) {
                    aborted = true;
                    break;
                }

                GradientSet grads = make_gradients(spec, params);
                double batch_mse = 0.0;
                for (auto& p : partial) {
                    accumulate(grads, p.grads);
                    batch_mse += p.mse_sum;
                }
                scale(grads, 1.0 / count);
                batch_mse /= count;
                if (!std::isfinite(batch_mse)) {
                    aborted = true;
                    break;
                }
                epoch_mse += batch_mse;
                ++batches;

                if (cfg.beta > 0.0 && spec.sharing == Sharing::TimeDynamic)
                    temporal_penalty_grad(spec, params, cfg.beta, penalty_tau_ref(spec, params),
                                          grads);

                std::vector<double> flat = flatten(spec, params);
                adam_step(flat, flatten(spec, params, grads), adam, cfg.lr);
                unflatten(spec, std::move(flat), params);
                project_with_hints(spec, params, n, tracker);
            }
            if (aborted) break;

            EpochLog entry;
            entry.epoch = epoch;
            entry.train_mse = batches > 0 ? epoch_mse / batches : 0.0;
            entry.val_psnr = evaluate_psnr(spec, params, data.val, cfg.threads);
            log.push_back(entry);
            if (on_epoch) on_epoch(restart, entry);

            if (entry.val_psnr > best_val + 1e-9) {
                best_val = entry.val_psnr;
                best_params = params;
                since_best = 0;
            } else if (++since_best >= cfg.patience) {
                break;
            }
        }

        if (aborted) {
            best.nan_aborts += 1;
            continue;
        }
        if (best_val > best.best_val_psnr) {
            best.best_val_psnr = best_val;
            best.params = std::move(best_params);
            best.log = std::move(log);
            best.best_restart = restart;
        }
    }

    if (best.best_restart < 0)
        throw NumericalError("train: every restart aborted with non-finite loss");
    return best;
}

std::vector<double> default_lambda_grid(FluxKind kind) {
    if (!flux_has_lambda(kind)) return {1.0};
    std::vector<double> grid;
    for (double l = 1.0; l <= 64.1; l *= std::sqrt(2.0)) grid.push_back(l);
    return grid;
}

std::vector<double> default_time_grid() {
    std::vector<double> grid;
    for (double t = 1.0; t <= 1024.1; t *= std::sqrt(2.0)) grid.push_back(t);
    return grid;
}

BaselineResult classical_baseline(const SplitDataset& data, FluxKind kind,
                                  const std::vector<double>& lambda_grid,
                                  const std::vector<double>& time_grid, int threads) {
    if (data.val.noisy.empty() || data.test.noisy.empty())
        throw ConfigError("classical_baseline: needs validation and test splits");
    const int n = data.val.noisy.front().length();
    KernelBank kernel = KernelBank::single({0.0, -1.0, 1.0});
    const FluxFunction probe{kind, 1.0};
    const StabilityReport bound = stability_bound(kernel, n, probe);
    const double tau = bound.tau_max;

    // checkpoint step counts for the time grid
    std::vector<int> checkpoints;
    for (double t : time_grid)
        checkpoints.push_back(std::max(1, static_cast<int>(std::lround(t / tau))));

    BaselineResult best;
    best.val_psnr = -std::numeric_limits<double>::infinity();

    for (double lambda : lambda_grid) {
        SchemeConfig cfg;
        cfg.tau = tau;
        cfg.flux = {kind, lambda};

        const int count = static_cast<int>(data.val.noisy.size());
        std::vector<std::vector<double>> chunk_sums(
            static_cast<size_t>(std::max(1, std::min(threads, count))),
            std::vector<double>(checkpoints.size(), 0.0));
        parallel_chunks(count, threads, [&](int chunk, int begin, int end) {
            for (int i = begin; i < end; ++i) {
                SignalBundle u = data.val.noisy[i];
                int done = 0;
                for (size_t c = 0; c < checkpoints.size(); ++c) {
                    for (; done < checkpoints[c]; ++done) u = explicit_step(u, kernel, cfg);
                    chunk_sums[chunk][c] += psnr(u, data.val.clean[i]);
                }
            }
        });
        for (size_t c = 0; c < checkpoints.size(); ++c) {
            double sum = 0.0;
            for (const auto& cs : chunk_sums) sum += cs[c];
            const double mean_psnr = sum / count;
            if (mean_psnr > best.val_psnr) {
                best.val_psnr = mean_psnr;
                best.lambda = lambda;
                best.steps = checkpoints[c];
                best.total_time = checkpoints[c] * tau;
            }
        }
    }

    // score the winner on the test split
    {
        SchemeConfig cfg;
        cfg.tau = tau;
        cfg.flux = {kind, best.lambda};
        const int count = static_cast<int>(data.test.noisy.size());
        std::vector<double> chunk_sums(static_cast<size_t>(std::max(1, std::min(threads, count))),
                                       0.0);
        parallel_chunks(count, threads, [&](int chunk, int begin, int end) {
            for (int i = begin; i < end; ++i) {
                SignalBundle u = data.test.noisy[i];
                for (int s = 0; s < best.steps; ++s) u = explicit_step(u, kernel, cfg);
                chunk_sums[chunk] += psnr(u, data.test.clean[i]);
            }
        });
        double sum = 0.0;
        for (double s : chunk_sums) sum += s;
        best.test_psnr = sum / count;
    }
    return best;
}

} // namespace pdenet
