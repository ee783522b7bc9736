// Experiment driver: covering sweeps, skeleton extraction, horseshoe
// synthesis and verification campaigns over a key = value config.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blendlab/blender.hpp"
#include "blendlab/config.hpp"
#include "blendlab/error.hpp"
#include "blendlab/parallel.hpp"
#include "blendlab/skeleton.hpp"
#include "blendlab/synthesis.hpp"

namespace fs = std::filesystem;
using namespace blendlab;

namespace {

struct StageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class Fn>
auto stage(const char* name, std::size_t m, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        std::string where = std::string("stage ") + name;
        if (m) where += " (m=" + std::to_string(m) + ")";
        throw StageError(where + ": " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << text;
    if (!os) throw Error("cannot write " + path.string());
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read config: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string tag(std::size_t m) { return "m" + std::to_string(m); }

nlohmann::json echo_json(const ExperimentConfig& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : cfg.echo) j[k] = v;
    return j;
}

struct Run {
    ExperimentConfig cfg;
    fs::path out;
    unsigned jobs = 1;

    // Outer sweep over m in a worker pool; one level of parallelism only.
    unsigned inner_jobs() const { return cfg.m_list.size() > 1 ? 1 : jobs; }
    unsigned outer_jobs() const { return cfg.m_list.size() > 1 ? jobs : 1; }
};

int cmd_cover(const Run& run) {
    const auto& cfg = run.cfg;
    const BlenderSpec b(cfg.system.lambda, cfg.system.eps, cfg.system.delta);
    const std::size_t n = cfg.widths.size();
    std::vector<std::optional<CoveringReport>> reports(n);
    parallel_for(n, run.jobs, [&](std::size_t i) {
        reports[i] = stage("cover", 0, [&] { return cover(b, centered_strip(b, cfg.widths[i]), cfg.cover_C); });
    });

    std::string csv = kCoverCsvHeader;
    nlohmann::json rows = nlohmann::json::array();
    std::vector<std::size_t> ells;
    bool bounds_ok = true;
    for (const auto& r : reports) {
        csv += to_csv_row(*r);
        rows.push_back(r->to_json());
        ells.push_back(r->ell_measured);
        bounds_ok = bounds_ok && r->ell_measured <= r->ell_bound;
    }
    nlohmann::json j = {{"blender", b.to_json()}, {"C", cfg.cover_C}, {"rows", rows}, {"bounds_ok", bounds_ok}};
    j["fitted_C"] = stage("fit", 0, [&] { return fit_C(b, cfg.widths); });
    const double target = 1.0 / std::log(b.lambda_bh());
    j["slope_target"] = target;
    if (n >= 2) {
        const double slope = log_law_slope(cfg.widths, ells);
        j["slope"] = slope;
        j["slope_ok"] = std::abs(slope - target) <= 0.05 * target;
    }
    write_file(run.out / "cover.csv", csv);
    write_file(run.out / "cover.json", dump(j));
    std::printf("cover: %zu widths, fitted C %.6f, bounds %s\n", n, j["fitted_C"].get<double>(),
                bounds_ok ? "hold" : "violated");
    return bounds_ok ? 0 : 1;
}

struct SweepPoint {
    std::optional<Skeleton> sk;
    std::optional<HorseshoeSpec> hs;
    std::optional<VerificationReport> report;
};

int cmd_campaign(const Run& run, Command c) {
    const auto& cfg = run.cfg;
    const auto sys = stage("system", 0, [&] { return default_testbed(cfg.system); });
    const auto mu = stage("measure", 0, [&] { return sys.bernoulli(cfg.weights); });

    std::optional<AccessibilityReport> access;
    if (c != Command::Skeleton) {
        AccessOptions opt;
        opt.grid_bits = cfg.system.grid_bits;
        access = stage("connecting_time", 0, [&] {
            return connecting_time(sys, default_target(sys.blender()), cfg.access_delta, opt);
        });
        write_file(run.out / "access.json", dump(access->to_json()));
    }

    std::vector<SweepPoint> points(cfg.m_list.size());
    parallel_for(points.size(), run.outer_jobs(), [&](std::size_t i) {
        const std::size_t m = cfg.m_list[i];
        SkeletonParams p = cfg.skeleton;
        p.m = m;
        auto& pt = points[i];
        pt.sk = stage("extract", m, [&] { return extract(sys, mu, p, run.inner_jobs()); });
        stage("certify", m, [&] { return certify(sys, *pt.sk); });
        if (c == Command::Skeleton) return;
        pt.hs = stage("synthesize", m, [&] { return synthesize(sys, *pt.sk, *access, cfg.mode, run.inner_jobs()); });
        if (c == Command::Synthesize) return;
        VerifyOptions vo = cfg.verify;
        vo.jobs = run.inner_jobs();
        pt.report = stage("verify", m, [&] { return verify(sys, *pt.hs, *pt.sk, mu, cfg.mode, vo); });
    });

    // Single collector, sweep order.
    bool all_pass = true;
    std::string csv = kSummaryCsvHeader;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const std::size_t m = cfg.m_list[i];
        const auto& pt = points[i];
        std::ostringstream words;
        if (c == Command::Skeleton) {
            nlohmann::json j = pt.sk->to_json();
            j["card_bound"] = skeleton_card_bound(pt.sk->params, mu.entropy());
            j["entropy"] = mu.entropy();
            write_file(run.out / ("skeleton_" + tag(m) + ".json"), dump(j));
            write_words(words, pt.sk->words);
            write_file(run.out / ("words_" + tag(m) + ".txt"), words.str());
            std::printf("skeleton m=%zu: card %zu (bound %.1f)\n", m, pt.sk->card(), j["card_bound"].get<double>());
            continue;
        }
        write_words(words, pt.hs->cycle_words);
        write_file(run.out / ("cycles_" + tag(m) + ".txt"), words.str());
        if (c == Command::Synthesize) {
            write_file(run.out / ("horseshoe_" + tag(m) + ".json"), dump(pt.hs->to_json(false)));
            std::printf("synthesize m=%zu: card %zu N %zu ell %zu exponents [%.6f, %.6f]\n", m, pt.hs->card(),
                        pt.hs->N, pt.hs->ell, pt.hs->exponent_min, pt.hs->exponent_max);
            continue;
        }
        const auto& r = *pt.report;
        nlohmann::json j = r.to_json();
        j["horseshoe"] = pt.hs->to_json(false);
        j["config"] = echo_json(cfg);
        write_file(run.out / ("report_" + tag(m) + ".json"), dump(j));
        csv += to_csv_row(r);
        all_pass = all_pass && r.pass();
        std::printf("%s m=%zu: card %zu N %zu h_est %.6f exponents [%.6f, %.6f] D_max %.6f %s\n",
                    std::string(command_name(c)).c_str(), m, r.card, r.N, r.entropy_estimate, r.exponent_min,
                    r.exponent_max, r.D_max, r.pass() ? "pass" : "FAIL");
    }
    if (c == Command::Skeleton || c == Command::Synthesize) return 0;
    write_file(run.out / "summary.csv", csv);
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blendlab experiment driver"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    unsigned jobs = 1;
    std::vector<std::string> sets;

    const std::vector<std::pair<Command, const char*>> commands = {
        {Command::Cover, "covering-length sweep over widths"},
        {Command::Skeleton, "extract and certify skeletons for each m"},
        {Command::Synthesize, "build horseshoes for each m"},
        {Command::VerifyA, "full pipeline in mode A"},
        {Command::VerifyB, "full pipeline in mode B"},
        {Command::Pipeline, "full pipeline in the configured mode"},
    };
    for (const auto& [c, help] : commands) {
        auto* sub = app.add_subcommand(std::string(command_name(c)), help);
        sub->add_option("--config", config_path, "key = value config file (default: built-in)");
        sub->add_option("--seed", seed, "overrides the seed key");
        sub->add_option("--out", out, "output directory")->capture_default_str();
        sub->add_option("--jobs", jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--set", sets, "key=value override, repeatable");
    }
    CLI11_PARSE(app, argc, argv);

    const Command c = parse_command(app.get_subcommands().front()->get_name());
    Run run;
    try {
        KeyValues kv = parse_key_values(config_path.empty() ? std::string(kDefaultConfig) : read_file(config_path));
        for (const auto& s : sets) apply_override(kv, s);
        if (seed) kv["seed"] = std::to_string(*seed);
        run.cfg = ExperimentConfig::build(kv, c);
        run.out = out;
        run.jobs = jobs;
        fs::create_directories(run.out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        return c == Command::Cover ? cmd_cover(run) : cmd_campaign(run, c);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\nconfig:\n", e.what());
        for (const auto& [k, v] : run.cfg.echo) std::fprintf(stderr, "  %s = %s\n", k.c_str(), v.c_str());
        return 1;
    }
}
