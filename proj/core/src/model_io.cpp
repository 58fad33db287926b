#include "pdenet/errors.hpp"
#include "pdenet/network.hpp"

#include <fstream>
#include <sstream>

namespace pdenet {

namespace {

std::string sharing_name(Sharing s) {
    return s == Sharing::Shared ? "shared" : "time-dynamic";
}

Sharing parse_sharing(const std::string& s) {
    if (s == "shared") return Sharing::Shared;
    if (s == "time-dynamic") return Sharing::TimeDynamic;
    throw ConfigError("model file: unknown sharing mode '" + s + "'");
}

std::string stability_name(StabilityMode m) {
    return m == StabilityMode::SpectralExact ? "spectral" : "gershgorin";
}

StabilityMode parse_stability(const std::string& s) {
    if (s == "spectral") return StabilityMode::SpectralExact;
    if (s == "gershgorin") return StabilityMode::GershgorinAPriori;
    throw ConfigError("model file: unknown stability mode '" + s + "'");
}

void write_values(std::ostream& out, const std::string& key, const std::vector<double>& values) {
    out << key << " =";
    for (double v : values) out << ' ' << format_double(v);
    out << '\n';
}

std::vector<double> parse_values(const std::string& text, const std::string& path) {
    std::vector<double> values;
    std::istringstream ss(text);
    std::string tok;
    while (ss >> tok) {
        try {
            values.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw IoError("model file: malformed number '" + tok + "' in " + path);
        }
    }
    return values;
}

} // namespace

void save_model(const std::string& path, const NetworkSpec& spec, const NetworkParams& params) {
    validate_params(spec, params);
    std::ofstream out(path);
    if (!out) throw IoError("cannot open model file for writing: " + path);
    out << "pdenet-model 1\n";
    out << "arch = " << architecture_name(spec.arch) << '\n';
    out << "blocks = " << spec.blocks << '\n';
    out << "channels = " << spec.channels << '\n';
    out << "flux = " << flux_kind_name(spec.flux) << '\n';
    out << "sharing = " << sharing_name(spec.sharing) << '\n';
    out << "stability = " << stability_name(spec.stability) << '\n';
    if (spec.arch == Architecture::FSINet) write_values(out, "fsi_alphas", params.fsi_alphas);
    for (size_t i = 0; i < params.blocks.size(); ++i) {
        const BlockParams& b = params.blocks[i];
        out << "block = " << i << '\n';
        write_values(out, "kernel", b.kernel.taps());
        if (b.outer_kernel) write_values(out, "outer_kernel", b.outer_kernel->taps());
        if (!b.bias_in.empty()) write_values(out, "bias_in", b.bias_in);
        if (!b.bias_out.empty()) write_values(out, "bias_out", b.bias_out);
        out << "lambda = " << format_double(b.lambda) << '\n';
        out << "tau = " << format_double(b.tau) << '\n';
        out << "alpha = " << format_double(b.alpha) << '\n';
    }
    if (!out) throw IoError("model file write failed: " + path);
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("pdenet-model", 0) != 0)
        throw IoError("not a pdenet model file: " + path);

    LoadedModel model;
    NetworkSpec& spec = model.spec;
    std::vector<BlockParams> blocks;
    BlockParams* current = nullptr;

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("model file: malformed line '" + line + "'");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);

        if (key == "arch") spec.arch = parse_architecture(value);
        else if (key == "blocks") spec.blocks = std::stoi(value);
        else if (key == "channels") spec.channels = std::stoi(value);
        else if (key == "flux") spec.flux = parse_flux_kind(value);
        else if (key == "sharing") spec.sharing = parse_sharing(value);
        else if (key == "stability") spec.stability = parse_stability(value);
        else if (key == "fsi_alphas") model.params.fsi_alphas = parse_values(value, path);
        else if (key == "block") {
            blocks.emplace_back();
            current = &blocks.back();
        } else if (current == nullptr) {
            throw IoError("model file: '" + key + "' before any block in " + path);
        } else if (key == "kernel") {
            current->kernel =
                KernelBank::from_taps(spec.channels, spec.channels, parse_values(value, path));
        } else if (key == "outer_kernel") {
            current->outer_kernel =
                KernelBank::from_taps(spec.channels, spec.channels, parse_values(value, path));
        } else if (key == "bias_in") current->bias_in = parse_values(value, path);
        else if (key == "bias_out") current->bias_out = parse_values(value, path);
        else if (key == "lambda") current->lambda = std::stod(value);
        else if (key == "tau") current->tau = std::stod(value);
        else if (key == "alpha") current->alpha = std::stod(value);
        else throw IoError("model file: unknown key '" + key + "' in " + path);
    }
    model.params.blocks = std::move(blocks);
    validate_params(spec, model.params);
    return model;
}

} // namespace pdenet
