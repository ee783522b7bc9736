#pragma once

// Experiment configuration: a plain `key = value` text file, one key per
// line, `#` starts a comment. Lists are comma separated. Every key a
// subcommand reads must be present; there is no silent fallback.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "blendlab/model.hpp"
#include "blendlab/skeleton.hpp"
#include "blendlab/synthesis.hpp"
#include "json.hpp"

namespace blendlab {

using KeyValues = std::map<std::string, std::string>;

// Throws "config line N: ..." on malformed lines and duplicate keys.
KeyValues parse_key_values(std::string_view text);
// Applies a single "key=value" override.
void apply_override(KeyValues& kv, std::string_view assignment);

enum class Command { Cover, Skeleton, Synthesize, VerifyA, VerifyB, Pipeline };

Command parse_command(std::string_view name);
std::string_view command_name(Command c);
// Keys read by a subcommand, in schema order.
std::vector<std::string> required_keys(Command c);
const std::vector<std::string>& known_keys();

struct ExperimentConfig {
    TestbedParams system;
    double access_delta = 0.05;
    std::vector<double> weights;
    std::vector<std::size_t> m_list;
    SkeletonParams skeleton;  // m is taken from m_list per sweep point
    ModeSpec mode;
    std::vector<double> widths;
    double cover_C = kDefaultCoverC;
    VerifyOptions verify;
    std::uint64_t seed = 1;

    // Throws "missing config key: K", "unknown config key: K",
    // "bad value for K: V", "no widths" or "no m values".
    static ExperimentConfig build(const KeyValues& kv, Command c);
    // The keys the command read, for echoing on failure.
    KeyValues echo;
};

// Complete configuration covering every key; used when --config is absent.
extern const char* const kDefaultConfig;

}  // namespace blendlab
