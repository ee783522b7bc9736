#pragma once

// Horseshoe synthesis from a skeleton: each skeleton word is wrapped by a
// connect-in word, a connect-out word and a blender covering word into a
// cycle word of common length N whose rectangle returns across the whole
// target. Verification checks entropy, exponents and weak* distances.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "blendlab/metrics.hpp"
#include "blendlab/model.hpp"
#include "blendlab/skeleton.hpp"
#include "json.hpp"

namespace blendlab {

enum class Mode { A, B };

struct ModeSpec {
    Mode mode = Mode::A;
    double beta = 0.1;   // mode B target exponent
    double delta = 0.1;  // exponent / distance tolerance
};

std::string to_string(Mode m);

struct CycleComponents {
    Word in;
    Word skeleton;
    Word out;
    Word blender;
};

struct HorseshoeSpec {
    ModeSpec mode;
    std::size_t m = 0;
    std::size_t t_con = 0;  // common length of the connecting words
    std::size_t ell = 0;
    std::size_t N = 0;
    double delta_c = 0.0;
    Arc target;
    Arc anchor_interval;  // I_0
    std::vector<Word> cycle_words;
    std::vector<CycleComponents> components;
    std::vector<Arc> rectangles;  // R_i inside the target, mapped onto it
    std::vector<double> periodic_points;
    std::vector<double> exponents;
    std::vector<std::size_t> cover_lengths;  // ell_i before padding
    double entropy_estimate = 0.0;
    double exponent_min = 0.0;
    double exponent_max = 0.0;

    std::size_t card() const { return cycle_words.size(); }
    nlohmann::json to_json(bool include_words = true) const;
};

HorseshoeSpec synthesize(const SkewProductSystem& sys, const Skeleton& sk, const AccessibilityReport& access,
                         const ModeSpec& mode, unsigned jobs = 1);

struct PeriodicMeasure {
    Word word;
    double point = 0.0;
    std::vector<double> frequencies;
    double exponent = 0.0;
};

// Periodic orbit of a concatenation of cycle words (indices into hs).
PeriodicMeasure periodic_measure(const SkewProductSystem& sys, const HorseshoeSpec& hs,
                                 const std::vector<std::size_t>& indices);
PeriodicMeasure periodic_measure(const SkewProductSystem& sys, const HorseshoeSpec& hs, std::size_t index);

// Replays a concatenation: nested rectangles are nonempty, every return
// lands in the next rectangle and every blender letter acts inside the
// blender domain.
bool replay_concatenation(const SkewProductSystem& sys, const HorseshoeSpec& hs,
                          const std::vector<std::size_t>& indices);

struct BlockEntropy {
    double value = 0.0;
    std::size_t depth = 0;
    bool explicit_count = false;  // false: product rule after an injectivity check
};

inline constexpr std::size_t kExplicitBlockLimit = std::size_t{1} << 20;

BlockEntropy block_count_entropy(const HorseshoeSpec& hs, std::size_t depth, std::uint64_t seed = 1);

// Lower exponent floor (-log K0 - m eps1 + 2 t_con log frak m + ell log lambda) / N.
double exponent_floor(const SkewProductSystem& sys, const HorseshoeSpec& hs, const SkeletonParams& p);

struct VerifyOptions {
    std::size_t samples = 32;
    std::size_t max_concat = 3;  // cycle words per sampled periodic orbit
    std::size_t legality_checks = 1000;
    std::size_t legality_max_len = 5;
    std::size_t block_depth = 3;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

struct VerificationReport {
    Mode mode = Mode::A;
    std::string family_version;
    std::size_t m = 0, N = 0, ell = 0, card = 0, t_con = 0;

    double entropy_lower = 0.0;
    double entropy_estimate = 0.0;
    double entropy_upper = 0.0;
    BlockEntropy block;

    double exponent_floor = 0.0;
    double exponent_min = 0.0;
    double exponent_max = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;

    std::vector<double> distances;
    double D_max = 0.0;
    double D_bound = 0.0;
    double D_self = 0.0;
    double tail = 0.0;

    double birkhoff_dev_max = 0.0;
    double birkhoff_bound = 0.0;

    std::size_t legality_checked = 0;

    bool entropy_ok = false;
    bool block_ok = false;
    bool exponents_positive = false;
    bool exponent_window_ok = false;
    bool floor_ok = false;
    bool weakstar_ok = false;
    bool legality_ok = false;

    // Per-cycle Birkhoff deviations are reported, not gated (see README).
    bool pass() const;
    nlohmann::json to_json() const;
};

VerificationReport verify(const SkewProductSystem& sys, const HorseshoeSpec& hs, const Skeleton& sk,
                          const BernoulliModel& mu, const ModeSpec& mode, const VerifyOptions& opt = {});

inline constexpr const char* kSummaryCsvHeader =
    "# blendlab synthesis csv v1\nm,N,ell,card,h_est,chi_min,chi_max,D_max,pass\n";
std::string to_csv_row(const VerificationReport& r);

}  // namespace blendlab
