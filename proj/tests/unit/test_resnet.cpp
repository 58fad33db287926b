#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdenet/errors.hpp"
#include "pdenet/gradients.hpp"
#include "pdenet/network.hpp"
#include "pdenet/trainer.hpp"
#include "test_support.hpp"

#include <cmath>
#include <filesystem>

using namespace pdenet;
using testsupport::random_bank;
using testsupport::random_signal;

namespace {

double max_abs_diff(const SignalBundle& a, const SignalBundle& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

NetworkParams random_network(const NetworkSpec& spec, std::mt19937_64& rng, double tap_scale = 0.4) {
    std::uniform_real_distribution<double> taps(-tap_scale, tap_scale);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    NetworkParams p = make_params(spec);
    for (auto& b : p.blocks) {
        for (double& t : b.kernel.taps()) t = taps(rng);
        if (b.outer_kernel)
            for (double& t : b.outer_kernel->taps()) t = taps(rng);
        for (double& t : b.bias_in) t = 0.2 * taps(rng);
        for (double& t : b.bias_out) t = 0.2 * taps(rng);
        b.lambda = 0.5 + unit(rng);
        b.tau = 0.2 * unit(rng);
        b.alpha = 0.5 + unit(rng);
    }
    for (double& a : p.fsi_alphas) a = 0.3 + unit(rng);
    return p;
}

} // namespace

TEST_CASE("diffusion block equals explicit_step bit for bit") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        BlockParams p;
        p.kernel = random_bank(rng, 2, 2);
        p.lambda = 1.5;
        p.tau = 0.11;
        FluxFunction f{FluxKind::PeronaMalik, p.lambda};
        SignalBundle u = random_signal(rng, 2, 14);
        SignalBundle a = diffusion_block_forward(u, p, f);
        SchemeConfig cfg;
        cfg.tau = p.tau;
        cfg.flux = f;
        SignalBundle b = explicit_step(u, p.kernel, cfg);
        CHECK(max_abs_diff(a, b) == 0.0);
    }
}

TEST_CASE("zero kernel makes identity blocks") {
    std::mt19937_64 rng(2);
    SignalBundle u = random_signal(rng, 1, 9);
    BlockParams p;
    p.kernel = KernelBank(1, 1);
    p.tau = 0.7;
    FluxFunction f{FluxKind::Charbonnier, 1.0};
    CHECK(max_abs_diff(diffusion_block_forward(u, p, f), u) == 0.0);

    // standard block with W2 = 0 is the identity too
    BlockParams q;
    q.kernel = random_bank(rng, 1, 1);
    q.outer_kernel = KernelBank(1, 1);
    q.bias_in = {0.3};
    q.bias_out = {0.0};
    CHECK(max_abs_diff(standard_resblock_forward(u, q, f), u) == 0.0);
}

TEST_CASE("standard block with W1=K, W2=-tau K^T, zero biases equals the diffusion block") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const int c = 1 + static_cast<int>(rng() % 2);
        KernelBank k = random_bank(rng, c, c);
        const double tau = 0.17;

        BlockParams sym;
        sym.kernel = k;
        sym.tau = tau;
        sym.lambda = 1.2;

        // outer bank = -tau K^T: transpose channel bank and mirror taps
        KernelBank outer(c, c);
        for (int co = 0; co < c; ++co)
            for (int ci = 0; ci < c; ++ci)
                for (int t = 0; t < 3; ++t) outer.tap(co, ci, t) = -tau * k.tap(ci, co, 2 - t);

        BlockParams std_block;
        std_block.kernel = k;
        std_block.outer_kernel = outer;
        std_block.bias_in.assign(c, 0.0);
        std_block.bias_out.assign(c, 0.0);
        std_block.lambda = sym.lambda;

        FluxFunction f{FluxKind::PeronaMalik, sym.lambda};
        SignalBundle u = random_signal(rng, c, 21);
        SignalBundle a = diffusion_block_forward(u, sym, f);
        SignalBundle b = standard_resblock_forward(u, std_block, f);
        // the adjoint differs from the mirrored kernel only in boundary rows,
        // so compare away from the boundary
        for (int ch = 0; ch < c; ++ch)
            for (int i = 2; i < 19; ++i)
                CHECK(a.at(ch, i) == doctest::Approx(b.at(ch, i)).epsilon(1e-12));
    }
}

TEST_CASE("network_forward: one SymResNet block is one explicit step") {
    std::mt19937_64 rng(4);
    NetworkSpec spec;
    spec.arch = Architecture::SymResNet;
    spec.blocks = 1;
    spec.channels = 1;
    spec.flux = FluxKind::PeronaMalik;
    NetworkParams params = random_network(spec, rng);
    SignalBundle u = random_signal(rng, 1, 30);
    SignalBundle out = network_forward(spec, params, u);
    SchemeConfig cfg;
    cfg.tau = params.blocks[0].tau;
    cfg.flux = {spec.flux, params.blocks[0].lambda};
    CHECK(max_abs_diff(out, explicit_step(u, params.blocks[0].kernel, cfg)) == 0.0);
}

TEST_CASE("FSINet with all weights 1 reduces to the SymResNet chain") {
    std::mt19937_64 rng(5);
    NetworkSpec fsi;
    fsi.arch = Architecture::FSINet;
    fsi.blocks = 6;
    fsi.channels = 2;
    fsi.sharing = Sharing::TimeDynamic;
    fsi.flux = FluxKind::Charbonnier;
    NetworkParams params = random_network(fsi, rng);
    std::fill(params.fsi_alphas.begin(), params.fsi_alphas.end(), 1.0);

    NetworkSpec sym = fsi;
    sym.arch = Architecture::SymResNet;
    NetworkParams sym_params = params;
    sym_params.fsi_alphas.clear();

    SignalBundle u = random_signal(rng, 1, 25);
    CHECK(max_abs_diff(network_forward(fsi, params, u), network_forward(sym, sym_params, u)) <=
          1e-12);
}

TEST_CASE("DFNet with tau*alpha = 1/2 reduces to the SymResNet chain") {
    std::mt19937_64 rng(6);
    NetworkSpec df;
    df.arch = Architecture::DFNet;
    df.blocks = 5;
    df.channels = 1;
    df.sharing = Sharing::TimeDynamic;
    df.flux = FluxKind::PeronaMalik;
    NetworkParams params = random_network(df, rng);
    for (auto& b : params.blocks) b.alpha = 0.5 / b.tau;

    NetworkSpec sym = df;
    sym.arch = Architecture::SymResNet;
    // the inner DF step size is 1/(2 alpha) = tau, so the chains coincide
    SignalBundle u = random_signal(rng, 1, 40);
    CHECK(max_abs_diff(network_forward(df, params, u), network_forward(sym, params, u)) <= 1e-12);
}

TEST_CASE("Shared and TimeDynamic coincide when all blocks are equal") {
    std::mt19937_64 rng(7);
    for (auto arch : {Architecture::SymResNet, Architecture::ResNet, Architecture::DFNet,
                      Architecture::FSINet}) {
        NetworkSpec shared;
        shared.arch = arch;
        shared.blocks = 4;
        shared.channels = 2;
        shared.sharing = Sharing::Shared;
        shared.flux = FluxKind::PeronaMalik;
        NetworkParams sp = random_network(shared, rng);

        NetworkSpec dyn = shared;
        dyn.sharing = Sharing::TimeDynamic;
        NetworkParams dp;
        dp.blocks.assign(4, sp.blocks[0]);
        dp.fsi_alphas = sp.fsi_alphas;

        SignalBundle u = random_signal(rng, 1, 18);
        CHECK(max_abs_diff(network_forward(shared, sp, u), network_forward(dyn, dp, u)) == 0.0);
    }
}

TEST_CASE("C=1 output is independent of lifting plumbing") {
    std::mt19937_64 rng(8);
    NetworkSpec spec;
    spec.arch = Architecture::SymResNet;
    spec.blocks = 3;
    spec.channels = 1;
    spec.sharing = Sharing::Shared;
    NetworkParams params = random_network(spec, rng);
    SignalBundle u = random_signal(rng, 1, 22);
    SignalBundle out = network_forward(spec, params, u);

    SignalBundle state = lift_channels(u, 1);
    for (int b = 0; b < 3; ++b) {
        SchemeConfig cfg;
        cfg.tau = params.blocks[0].tau;
        cfg.flux = {spec.flux, params.blocks[0].lambda};
        state = explicit_step(state, params.blocks[0].kernel, cfg);
    }
    CHECK(max_abs_diff(out, average_channels(state)) == 0.0);
}

TEST_CASE("stability inheritance: projected SymResNets are nonexpansive") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 1000; ++trial) {
        NetworkSpec spec;
        spec.arch = Architecture::SymResNet;
        spec.blocks = 1 + static_cast<int>(rng() % 3);
        spec.channels = 1 + static_cast<int>(rng() % 2);
        spec.sharing = Sharing::TimeDynamic;
        spec.flux = std::array{FluxKind::Linear, FluxKind::Charbonnier, FluxKind::PeronaMalik,
                               FluxKind::ReLU}[trial % 4];
        NetworkParams params = random_network(spec, rng);
        for (auto& b : params.blocks) b.tau *= 40.0; // push taus beyond the bound
        const int n = 8 + static_cast<int>(rng() % 25);
        project_constraints(spec, params, n);

        SignalBundle state = random_signal(rng, spec.channels, n, -2.0, 2.0);
        for (int b = 0; b < spec.blocks; ++b) {
            const auto& p = params.blocks[b];
            SchemeConfig cfg;
            cfg.tau = p.tau;
            cfg.flux = {spec.flux, p.lambda};
            SignalBundle next = explicit_step(state, p.kernel, cfg);
            CHECK(next.norm() <= state.norm() * (1.0 + 1e-12));
            state = std::move(next);
        }
    }
}

TEST_CASE("count_parameters enumeration") {
    NetworkSpec sym;
    sym.arch = Architecture::SymResNet;
    sym.blocks = 1;
    sym.channels = 1;
    sym.sharing = Sharing::Shared;
    sym.flux = FluxKind::PeronaMalik;
    NetworkParams sp = make_params(sym);
    CHECK(count_parameters(sym, sp) == 5); // 3 taps + lambda + tau

    NetworkSpec res = sym;
    res.arch = Architecture::ResNet;
    NetworkParams rp = make_params(res);
    CHECK(count_parameters(res, rp) == 9); // 6 taps + 2 biases + lambda

    // symmetric kernel count is half the ResNet kernel count for any C
    for (int c : {1, 2, 3, 5}) {
        NetworkSpec s2 = sym;
        s2.channels = c;
        NetworkSpec r2 = res;
        r2.channels = c;
        NetworkParams sp2 = make_params(s2), rp2 = make_params(r2);
        const long sym_kernel = 3L * c * c;
        CHECK(count_parameters(s2, sp2) == sym_kernel + 2);
        CHECK(count_parameters(r2, rp2) == 2 * sym_kernel + 2 * c + 1);
    }

    // layout size must match the count for every architecture
    std::mt19937_64 rng(10);
    for (auto arch : {Architecture::SymResNet, Architecture::ResNet, Architecture::DFNet,
                      Architecture::FSINet}) {
        for (auto sharing : {Sharing::Shared, Sharing::TimeDynamic}) {
            NetworkSpec spec;
            spec.arch = arch;
            spec.blocks = 4;
            spec.channels = 2;
            spec.sharing = sharing;
            spec.flux = FluxKind::Charbonnier;
            NetworkParams p = random_network(spec, rng);
            CHECK(static_cast<long>(parameter_layout(spec, p).size()) ==
                  count_parameters(spec, p));
        }
    }
}

TEST_CASE("model file round trip is bit exact") {
    std::mt19937_64 rng(11);
    for (auto arch : {Architecture::SymResNet, Architecture::ResNet, Architecture::DFNet,
                      Architecture::FSINet}) {
        NetworkSpec spec;
        spec.arch = arch;
        spec.blocks = 3;
        spec.channels = 2;
        spec.sharing = Sharing::TimeDynamic;
        spec.flux = FluxKind::PeronaMalik;
        spec.stability = StabilityMode::GershgorinAPriori;
        NetworkParams params = random_network(spec, rng);

        const std::string path = "model_roundtrip_tmp.txt";
        save_model(path, spec, params);
        LoadedModel loaded = load_model(path);
        CHECK(loaded.spec.arch == spec.arch);
        CHECK(loaded.spec.blocks == spec.blocks);
        CHECK(loaded.spec.channels == spec.channels);
        CHECK(loaded.spec.flux == spec.flux);
        CHECK(loaded.spec.sharing == spec.sharing);
        CHECK(loaded.spec.stability == spec.stability);
        std::vector<double> a = flatten(spec, params);
        std::vector<double> b = flatten(loaded.spec, loaded.params);
        REQUIRE(a.size() == b.size());
        for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
        std::filesystem::remove(path);
    }
}

TEST_CASE("spec/params mismatch raises configuration errors") {
    NetworkSpec spec;
    spec.arch = Architecture::SymResNet;
    spec.blocks = 3;
    spec.sharing = Sharing::TimeDynamic;
    NetworkParams p = make_params(spec);
    p.blocks.pop_back();
    SignalBundle u(1, 8);
    CHECK_THROWS_AS(network_forward(spec, p, u), ConfigError);
}
