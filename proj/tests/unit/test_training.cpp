#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdenet/dataset.hpp"
#include "pdenet/errors.hpp"
#include "pdenet/trainer.hpp"
#include "test_support.hpp"

#include <cmath>
#include <filesystem>
#include <numeric>

using namespace pdenet;
using testsupport::random_signal;

namespace {

NetworkParams random_network(const NetworkSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> taps(-0.5, 0.5);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    NetworkParams p = make_params(spec);
    for (auto& b : p.blocks) {
        for (double& t : b.kernel.taps()) t = taps(rng);
        if (b.outer_kernel)
            for (double& t : b.outer_kernel->taps()) t = taps(rng);
        for (double& t : b.bias_in) t = 0.3 * taps(rng);
        for (double& t : b.bias_out) t = 0.3 * taps(rng);
        b.lambda = 0.6 + unit(rng);
        b.tau = 0.3 * unit(rng);
        b.alpha = 0.6 + unit(rng);
    }
    for (double& a : p.fsi_alphas) a = 0.4 + unit(rng);
    return p;
}

double network_mse_loss(const NetworkSpec& spec, const NetworkParams& params,
                        const SignalBundle& noisy, const SignalBundle& clean) {
    return mse(network_forward(spec, params, noisy), clean);
}

} // namespace

TEST_CASE("dataset generation") {
    DatasetConfig cfg;
    cfg.n_train = 30;
    cfg.n_val = 5;
    cfg.n_test = 5;
    cfg.seed = 99;

    SUBCASE("deterministic for a fixed seed") {
        SplitDataset a = generate_dataset(cfg);
        SplitDataset b = generate_dataset(cfg);
        REQUIRE(a.train.noisy.size() == b.train.noisy.size());
        for (size_t i = 0; i < a.train.noisy.size(); ++i)
            for (size_t j = 0; j < a.train.noisy[i].data().size(); ++j)
                CHECK(a.train.noisy[i].data()[j] == b.train.noisy[i].data()[j]);
    }

    SUBCASE("sigma = 0 gives noisy = clean") {
        cfg.noise_sigma = 0.0;
        SplitDataset d = generate_dataset(cfg);
        for (size_t i = 0; i < d.train.noisy.size(); ++i)
            for (size_t j = 0; j < d.train.noisy[i].data().size(); ++j)
                CHECK(d.train.noisy[i].data()[j] == d.train.clean[i].data()[j]);
    }

    SUBCASE("clean values in range, segment structure within the fractions") {
        SplitDataset d = generate_dataset(cfg);
        for (const auto& s : d.train.clean) {
            double max_run = 0.0, run = 0.0;
            for (int i = 1; i + 1 < s.length(); ++i) {
                const double second = s.at(0, i + 1) - 2.0 * s.at(0, i) + s.at(0, i - 1);
                if (std::abs(second) < 1e-6)
                    run += 1.0;
                else
                    run = 0.0;
                max_run = std::max(max_run, run);
            }
            const double max_segment = max_run + 2.0;
            CHECK(max_segment >= cfg.length * cfg.seg_min_frac - 1.0);
            CHECK(max_segment <= cfg.length * cfg.seg_max_frac + 0.5);
            for (double v : s.data()) {
                CHECK(v >= 0.0);
                CHECK(v <= 255.0);
            }
        }
    }

    SUBCASE("save / load round trip") {
        SplitDataset d = generate_dataset(cfg);
        const std::string dir = "dataset_tmp_dir";
        save_dataset(dir, d);
        SplitDataset back = load_dataset(dir);
        REQUIRE(back.train.noisy.size() == d.train.noisy.size());
        for (size_t j = 0; j < d.train.noisy[0].data().size(); ++j)
            CHECK(back.train.noisy[0].data()[j] == d.train.noisy[0].data()[j]);
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("mse and psnr") {
    SignalBundle a(1, 8), b(1, 8);
    for (int i = 0; i < 8; ++i) a.at(0, i) = b.at(0, i) = 3.0 * i;
    CHECK(mse(a, b) == 0.0);
    CHECK(std::isinf(psnr(a, b)));

    for (int i = 0; i < 8; ++i) b.at(0, i) += 255.0;
    CHECK(psnr(a, b) == doctest::Approx(0.0).epsilon(1e-12));

    for (int i = 0; i < 8; ++i) b.at(0, i) = a.at(0, i) + 16.0;
    CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(255.0 * 255.0 / 256.0)).epsilon(1e-12));

    SignalBundle c(1, 9);
    CHECK_THROWS_AS(mse(a, c), DimensionError);
}

TEST_CASE("temporal penalty") {
    NetworkSpec spec;
    spec.arch = Architecture::SymResNet;
    spec.blocks = 2;
    spec.channels = 1;
    spec.sharing = Sharing::TimeDynamic;
    spec.flux = FluxKind::PeronaMalik;
    NetworkParams p = make_params(spec);
    for (auto& b : p.blocks) {
        b.kernel.tap(0, 0, 1) = 0.5;
        b.lambda = 2.0;
        b.tau = 0.5;
    }

    SUBCASE("identical blocks have zero penalty") {
        CHECK(temporal_penalty(spec, p, 10.0, 1.0) == 0.0);
    }

    SUBCASE("single differing scalar gives beta d^2 / tau_ref") {
        const double d = 0.25;
        p.blocks[1].kernel.tap(0, 0, 1) += d;
        const double tau_ref = 0.5;
        CHECK(temporal_penalty(spec, p, 10.0, tau_ref) ==
              doctest::Approx(10.0 * d * d / tau_ref).epsilon(1e-13));
        CHECK(temporal_penalty(spec, p, 20.0, tau_ref) ==
              doctest::Approx(2.0 * temporal_penalty(spec, p, 10.0, tau_ref)).epsilon(1e-13));
    }

    SUBCASE("numerical parameters are not penalised") {
        p.blocks[1].tau = 0.9;
        p.blocks[1].alpha = 3.0;
        CHECK(temporal_penalty(spec, p, 10.0, 1.0) == 0.0);
    }

    SUBCASE("shared networks have zero penalty by definition") {
        NetworkSpec shared = spec;
        shared.sharing = Sharing::Shared;
        NetworkParams sp = make_params(shared);
        CHECK(temporal_penalty(shared, sp, 10.0, 1.0) == 0.0);
    }

    SUBCASE("penalty gradient matches finite differences") {
        std::mt19937_64 rng(5);
        NetworkParams q = random_network(spec, rng);
        const double beta = 7.0, tau_ref = 0.37;
        GradientSet g = make_gradients(spec, q);
        temporal_penalty_grad(spec, q, beta, tau_ref, g);
        auto layout = parameter_layout(spec, q);
        auto flat_g = flatten(spec, q, g);
        for (size_t s = 0; s < layout.size(); ++s) {
            NetworkParams plus = q, minus = q;
            const double h = 1e-6;
            param_ref(plus, layout[s]) += h;
            param_ref(minus, layout[s]) -= h;
            const double fd = (temporal_penalty(spec, plus, beta, tau_ref) -
                               temporal_penalty(spec, minus, beta, tau_ref)) /
                              (2.0 * h);
            CHECK(std::abs(flat_g[s] - fd) <= 1e-6 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("adam steps") {
    SUBCASE("zero gradient leaves parameters unchanged") {
        std::vector<double> params{1.0, -2.0};
        std::vector<double> grads{0.0, 0.0};
        AdamState st = make_adam_state(2);
        adam_step(params, grads, st, 0.1);
        CHECK(params[0] == 1.0);
        CHECK(params[1] == -2.0);
        CHECK(st.step == 1);
    }
    SUBCASE("first step moves by about lr * sign(g)") {
        std::vector<double> params{0.0, 0.0};
        std::vector<double> grads{3.7, -0.002};
        AdamState st = make_adam_state(2);
        adam_step(params, grads, st, 0.01);
        CHECK(params[0] == doctest::Approx(-0.01).epsilon(1e-4));
        CHECK(params[1] == doctest::Approx(0.01).epsilon(1e-2));
    }
    SUBCASE("identical scalars with identical gradients stay identical") {
        std::vector<double> params{0.5, 0.5};
        AdamState st = make_adam_state(2);
        for (int i = 0; i < 25; ++i) {
            std::vector<double> grads{std::sin(i * 0.7), std::sin(i * 0.7)};
            adam_step(params, grads, st, 0.003);
            CHECK(params[0] == params[1]);
        }
    }
}

TEST_CASE("projection") {
    NetworkSpec spec;
    spec.arch = Architecture::SymResNet;
    spec.blocks = 1;
    spec.channels = 1;
    spec.flux = FluxKind::Linear;
    NetworkParams p = make_params(spec);
    p.blocks[0].kernel = gershgorin_rescale(KernelBank::single({0.0, -1.0, 1.0}));

    SUBCASE("tau clamps to the stability bound") {
        p.blocks[0].tau = 10.0;
        project_constraints(spec, p, 64);
        // ||K|| sits just below 1 at N=64 so the exact bound is just above 2
        CHECK(p.blocks[0].tau <= 2.01);
        CHECK(p.blocks[0].tau >= 1.99);
    }

    SUBCASE("FSI weights clamp to [0, 2]") {
        NetworkSpec fsi = spec;
        fsi.arch = Architecture::FSINet;
        fsi.blocks = 4;
        NetworkParams fp = make_params(fsi);
        fp.fsi_alphas = {2.5, -0.3, 1.0};
        project_constraints(fsi, fp, 32);
        CHECK(fp.fsi_alphas[0] == 2.0);
        CHECK(fp.fsi_alphas[1] == 0.0);
        CHECK(fp.fsi_alphas[2] == 1.0);
    }

    SUBCASE("DF alpha raised to the Appendix bound") {
        NetworkSpec df = spec;
        df.arch = Architecture::DFNet;
        NetworkParams dp = make_params(df);
        dp.blocks[0].kernel = p.blocks[0].kernel;
        dp.blocks[0].alpha = 0.01;
        project_constraints(df, dp, 64);
        CHECK(dp.blocks[0].alpha >= 0.24); // L ||K||^2 / 4 with ||K|| just below 1
        CHECK(dp.blocks[0].alpha <= 0.25 + 1e-12);
    }

    SUBCASE("lambda floor") {
        NetworkSpec pm = spec;
        pm.flux = FluxKind::PeronaMalik;
        NetworkParams q = make_params(pm);
        q.blocks[0].lambda = -3.0;
        project_constraints(pm, q, 32);
        CHECK(q.blocks[0].lambda == 1e-4);
    }

    SUBCASE("idempotence") {
        std::mt19937_64 rng(6);
        for (auto arch : {Architecture::SymResNet, Architecture::DFNet, Architecture::FSINet}) {
            NetworkSpec s;
            s.arch = arch;
            s.blocks = 3;
            s.channels = 2;
            s.sharing = Sharing::TimeDynamic;
            s.flux = FluxKind::PeronaMalik;
            NetworkParams q = random_network(s, rng);
            for (auto& b : q.blocks) b.tau *= 100.0;
            project_constraints(s, q, 24);
            std::vector<double> once = flatten(s, q);
            project_constraints(s, q, 24);
            std::vector<double> twice = flatten(s, q);
            for (size_t i = 0; i < once.size(); ++i) CHECK(once[i] == twice[i]);
        }
    }
}

TEST_CASE("gradient correctness against central finite differences") {
    std::mt19937_64 rng(7);
    for (auto arch : {Architecture::SymResNet, Architecture::ResNet, Architecture::DFNet,
                      Architecture::FSINet}) {
        for (auto sharing : {Sharing::Shared, Sharing::TimeDynamic}) {
            for (int channels : {1, 2}) {
                NetworkSpec spec;
                spec.arch = arch;
                spec.blocks = 3;
                spec.channels = channels;
                spec.sharing = sharing;
                spec.flux = FluxKind::PeronaMalik;
                NetworkParams params = random_network(spec, rng);
                SignalBundle noisy = random_signal(rng, 1, 16, -2.0, 2.0);
                SignalBundle clean = random_signal(rng, 1, 16, -2.0, 2.0);

                ForwardTape tape;
                SignalBundle out = network_forward(spec, params, noisy, &tape);
                SignalBundle upstream(1, out.length());
                for (int i = 0; i < out.length(); ++i)
                    upstream.at(0, i) = 2.0 / out.length() * (out.at(0, i) - clean.at(0, i));
                GradientSet grads = backward(spec, params, tape, upstream);
                auto layout = parameter_layout(spec, params);
                auto flat = flatten(spec, params, grads);

                for (size_t s = 0; s < layout.size(); ++s) {
                    NetworkParams plus = params, minus = params;
                    const double h = 1e-6 * std::max(1.0, std::abs(flatten(spec, params)[s]));
                    param_ref(plus, layout[s]) += h;
                    param_ref(minus, layout[s]) -= h;
                    const double fd = (network_mse_loss(spec, plus, noisy, clean) -
                                       network_mse_loss(spec, minus, noisy, clean)) /
                                      (2.0 * h);
                    const double an = flat[s];
                    CHECK(std::abs(an - fd) <= 1e-5 * std::max({1e-3, std::abs(an), std::abs(fd)}));
                }
            }
        }
    }
}

TEST_CASE("zero upstream gradient gives a zero gradient set") {
    std::mt19937_64 rng(8);
    NetworkSpec spec;
    spec.arch = Architecture::DFNet;
    spec.blocks = 3;
    spec.channels = 2;
    spec.sharing = Sharing::TimeDynamic;
    NetworkParams params = random_network(spec, rng);
    SignalBundle u = random_signal(rng, 1, 12);
    ForwardTape tape;
    network_forward(spec, params, u, &tape);
    SignalBundle upstream(1, 12);
    GradientSet g = backward(spec, params, tape, upstream);
    for (double v : flatten(spec, params, g)) CHECK(v == 0.0);
}

TEST_CASE("shared gradient equals the sum of per-block gradients") {
    std::mt19937_64 rng(9);
    for (auto arch : {Architecture::SymResNet, Architecture::ResNet, Architecture::FSINet}) {
        NetworkSpec shared;
        shared.arch = arch;
        shared.blocks = 4;
        shared.channels = 1;
        shared.sharing = Sharing::Shared;
        shared.flux = FluxKind::Charbonnier;
        NetworkParams sp = random_network(shared, rng);

        NetworkSpec dyn = shared;
        dyn.sharing = Sharing::TimeDynamic;
        NetworkParams dp;
        dp.blocks.assign(4, sp.blocks[0]);
        dp.fsi_alphas = sp.fsi_alphas;

        SignalBundle noisy = random_signal(rng, 1, 14);
        SignalBundle clean = random_signal(rng, 1, 14);

        auto compute = [&](const NetworkSpec& s, const NetworkParams& p) {
            ForwardTape tape;
            SignalBundle out = network_forward(s, p, noisy, &tape);
            SignalBundle upstream(1, 14);
            for (int i = 0; i < 14; ++i)
                upstream.at(0, i) = 2.0 / 14.0 * (out.at(0, i) - clean.at(0, i));
            return backward(s, p, tape, upstream);
        };
        GradientSet gs = compute(shared, sp);
        GradientSet gd = compute(dyn, dp);

        BlockGrads summed = gd.blocks[0];
        for (int b = 1; b < 4; ++b) {
            const auto& src = gd.blocks[b];
            for (size_t i = 0; i < summed.kernel.size(); ++i) summed.kernel[i] += src.kernel[i];
            for (size_t i = 0; i < summed.outer_kernel.size(); ++i)
                summed.outer_kernel[i] += src.outer_kernel[i];
            for (size_t i = 0; i < summed.bias_in.size(); ++i) summed.bias_in[i] += src.bias_in[i];
            for (size_t i = 0; i < summed.bias_out.size(); ++i)
                summed.bias_out[i] += src.bias_out[i];
            summed.lambda += src.lambda;
            summed.tau += src.tau;
            summed.alpha += src.alpha;
        }
        for (size_t i = 0; i < summed.kernel.size(); ++i)
            CHECK(gs.blocks[0].kernel[i] == doctest::Approx(summed.kernel[i]).epsilon(1e-11));
        CHECK(gs.blocks[0].lambda == doctest::Approx(summed.lambda).epsilon(1e-11));
        if (arch != Architecture::ResNet)
            CHECK(gs.blocks[0].tau == doctest::Approx(summed.tau).epsilon(1e-11));
        // FSI extrapolation weights are per block in both modes
        for (size_t i = 0; i < gs.fsi_alphas.size(); ++i)
            CHECK(gs.fsi_alphas[i] == doctest::Approx(gd.fsi_alphas[i]).epsilon(1e-11));
    }
}

TEST_CASE("training smoke tests") {
    DatasetConfig dcfg;
    dcfg.n_train = 32;
    dcfg.n_val = 8;
    dcfg.n_test = 8;
    dcfg.length = 64;
    dcfg.seed = 3;
    SplitDataset data = generate_dataset(dcfg);

    NetworkSpec spec;
    spec.arch = Architecture::SymResNet;
    spec.blocks = 2;
    spec.channels = 1;
    spec.sharing = Sharing::Shared;
    spec.flux = FluxKind::PeronaMalik;

    SUBCASE("lr = 0 leaves the initialisation untouched") {
        TrainConfig cfg;
        cfg.lr = 0.0;
        cfg.max_epochs = 3;
        cfg.restarts = 1;
        cfg.seed = 17;
        TrainResult r = train(spec, data, cfg);
        NetworkParams init = init_params(spec, cfg, cfg.seed * 1000003ULL);
        std::vector<double> a = flatten(spec, r.params);
        std::vector<double> b = flatten(spec, init);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }

    SUBCASE("loss decreases in trend on a tiny run") {
        TrainConfig cfg;
        cfg.max_epochs = 50;
        cfg.restarts = 1;
        cfg.seed = 11;
        cfg.batch_size = 8;
        TrainResult r = train(spec, data, cfg);
        REQUIRE(r.log.size() >= 20);
        double head = 0.0, tail = 0.0;
        for (int i = 0; i < 10; ++i) head += r.log[i].train_mse;
        for (size_t i = r.log.size() - 10; i < r.log.size(); ++i) tail += r.log[i].train_mse;
        CHECK(tail < head);
    }

    SUBCASE("training is reproducible for a fixed seed") {
        TrainConfig cfg;
        cfg.max_epochs = 5;
        cfg.restarts = 1;
        cfg.seed = 23;
        TrainResult a = train(spec, data, cfg);
        TrainResult b = train(spec, data, cfg);
        std::vector<double> fa = flatten(spec, a.params);
        std::vector<double> fb = flatten(spec, b.params);
        for (size_t i = 0; i < fa.size(); ++i) CHECK(fa[i] == fb[i]);
    }
}
