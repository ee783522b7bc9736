#include "blendlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

#include "blendlab/error.hpp"

namespace blendlab {

const char* const kDefaultConfig = R"(# blendlab experiment config
# fiber system
lambda = 1.5
eps = 0.25
delta = 0.05
beta = 0.6666666666666666
rho_rot = 0.6180344478216818
grid_bits = 8
access_delta = 0.05

# target measure: weights on symbols 0..3
weights = 0.5, 0, 0.5, 0

# skeleton
m_list = 20
sep_eps = 0.01
eps_H = 0.15
eps_E = 0.005
eps_B = 0.15
K0 = 4
L0 = 2
eps_D_ss = 0.001
eps_D_uu = 0.001
eps_D = 0.001

# synthesis mode: A, or B with target exponent mode_beta
mode = A
mode_beta = 0.1
mode_delta = 0.1

# covering sweep
widths = 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8
cover_C = 2

# verification
samples = 32
max_concat = 3
legality_checks = 1000
block_depth = 3
seed = 1
)";

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

const std::vector<std::string> kSystemKeys = {"lambda", "eps", "delta", "beta", "rho_rot", "grid_bits"};
const std::vector<std::string> kSkeletonKeys = {"weights", "m_list", "sep_eps", "eps_H",    "eps_E",   "eps_B",
                                                "K0",      "L0",     "eps_D_ss", "eps_D_uu", "eps_D"};
const std::vector<std::string> kSynthesisKeys = {"access_delta", "mode_beta", "mode_delta"};
const std::vector<std::string> kVerifyKeys = {"samples", "max_concat", "legality_checks", "block_depth", "seed"};

class Reader {
public:
    explicit Reader(const KeyValues& kv) : kv_(kv) {}

    const std::string& raw(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end()) throw Error("missing config key: " + key);
        echo[key] = it->second;
        return it->second;
    }
    double real(const std::string& key) { return to_real(key, raw(key)); }
    std::size_t count(const std::string& key) {
        const std::string& v = raw(key);
        std::size_t out = 0;
        const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || p != v.data() + v.size()) throw Error("bad value for " + key + ": " + v);
        return out;
    }
    std::vector<double> reals(const std::string& key) {
        std::vector<double> out;
        for (const auto& item : split(raw(key))) out.push_back(to_real(key, item));
        return out;
    }
    std::vector<std::size_t> counts(const std::string& key) {
        std::vector<std::size_t> out;
        for (const auto& item : split(raw(key))) {
            const double v = to_real(key, item);
            if (!(v >= 1.0) || v != std::floor(v)) throw Error("bad value for " + key + ": " + item);
            out.push_back(static_cast<std::size_t>(v));
        }
        return out;
    }

    KeyValues echo;

private:
    static std::vector<std::string> split(const std::string& v) {
        std::vector<std::string> out;
        std::string_view rest = v;
        while (!trim(rest).empty()) {
            const auto comma = rest.find(',');
            out.emplace_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return out;
    }
    static double to_real(const std::string& key, const std::string& v) {
        char* end = nullptr;
        const double x = std::strtod(v.c_str(), &end);
        if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
            throw Error("bad value for " + key + ": " + v);
        return x;
    }

    const KeyValues& kv_;
};

}  // namespace

KeyValues parse_key_values(std::string_view text) {
    KeyValues kv;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) throw Error(where + "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw Error(where + "empty key");
        if (kv.count(key)) throw Error(where + "duplicate key " + key);
        kv[key] = std::string(trim(line.substr(eq + 1)));
    }
    return kv;
}

void apply_override(KeyValues& kv, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) throw Error("override must be key=value");
    const std::string key(trim(assignment.substr(0, eq)));
    if (key.empty()) throw Error("override must be key=value");
    kv[key] = std::string(trim(assignment.substr(eq + 1)));
}

Command parse_command(std::string_view name) {
    for (Command c : {Command::Cover, Command::Skeleton, Command::Synthesize, Command::VerifyA, Command::VerifyB,
                      Command::Pipeline})
        if (command_name(c) == name) return c;
    throw Error("unknown command: " + std::string(name));
}

std::string_view command_name(Command c) {
    switch (c) {
        case Command::Cover: return "cover";
        case Command::Skeleton: return "skeleton";
        case Command::Synthesize: return "synthesize";
        case Command::VerifyA: return "verify-a";
        case Command::VerifyB: return "verify-b";
        case Command::Pipeline: return "pipeline";
    }
    return "?";
}

std::vector<std::string> required_keys(Command c) {
    std::vector<std::string> keys;
    auto add = [&](const std::vector<std::string>& more) { keys.insert(keys.end(), more.begin(), more.end()); };
    if (c == Command::Cover) return {"lambda", "eps", "delta", "widths", "cover_C"};
    add(kSystemKeys);
    add(kSkeletonKeys);
    if (c == Command::Skeleton) return keys;
    add(kSynthesisKeys);
    if (c == Command::Synthesize || c == Command::Pipeline) keys.push_back("mode");
    if (c == Command::Synthesize) return keys;
    add(kVerifyKeys);
    return keys;
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k = required_keys(Command::Pipeline);
        k.push_back("widths");
        k.push_back("cover_C");
        return k;
    }();
    return keys;
}

ExperimentConfig ExperimentConfig::build(const KeyValues& kv, Command c) {
    const auto& known = known_keys();
    for (const auto& [key, value] : kv)
        if (std::find(known.begin(), known.end(), key) == known.end()) throw Error("unknown config key: " + key);
    const auto needed = required_keys(c);
    auto needs = [&](const char* key) { return std::find(needed.begin(), needed.end(), key) != needed.end(); };

    Reader r(kv);
    // Missing keys are reported in schema order, before any value is parsed.
    for (const auto& key : needed) r.raw(key);

    ExperimentConfig cfg;
    cfg.system.lambda = r.real("lambda");
    cfg.system.eps = r.real("eps");
    cfg.system.delta = r.real("delta");
    if (c == Command::Cover) {
        cfg.widths = r.reals("widths");
        if (cfg.widths.empty()) throw Error("no widths");
        cfg.cover_C = r.real("cover_C");
        cfg.echo = r.echo;
        return cfg;
    }
    cfg.system.beta = r.real("beta");
    cfg.system.rho_rot = r.real("rho_rot");
    cfg.system.grid_bits = static_cast<unsigned>(r.count("grid_bits"));

    cfg.weights = r.reals("weights");
    cfg.m_list = r.counts("m_list");
    if (cfg.m_list.empty()) throw Error("no m values");
    SkeletonParams& p = cfg.skeleton;
    p.m = cfg.m_list.front();
    p.eps = r.real("sep_eps");
    p.eps_H = r.real("eps_H");
    p.eps_E = r.real("eps_E");
    p.eps_B = r.real("eps_B");
    p.K0 = r.real("K0");
    p.L0 = r.real("L0");
    p.eps_D_ss = r.real("eps_D_ss");
    p.eps_D_uu = r.real("eps_D_uu");
    p.eps_D = r.real("eps_D");
    p.validate();

    if (needs("access_delta")) {
        cfg.access_delta = r.real("access_delta");
        cfg.mode.beta = r.real("mode_beta");
        cfg.mode.delta = r.real("mode_delta");
        if (c == Command::VerifyA) {
            cfg.mode.mode = Mode::A;
        } else if (c == Command::VerifyB) {
            cfg.mode.mode = Mode::B;
        } else {
            const std::string& m = r.raw("mode");
            if (m == "A") cfg.mode.mode = Mode::A;
            else if (m == "B") cfg.mode.mode = Mode::B;
            else throw Error("bad value for mode: " + m);
        }
    }
    if (needs("seed")) {
        cfg.verify.samples = r.count("samples");
        cfg.verify.max_concat = r.count("max_concat");
        cfg.verify.legality_checks = r.count("legality_checks");
        cfg.verify.block_depth = r.count("block_depth");
        cfg.seed = r.count("seed");
        cfg.verify.seed = cfg.seed;
    }
    cfg.echo = r.echo;
    return cfg;
}

}  // namespace blendlab
