#pragma once

// Skeletons: sets of length-m words with frequency, Birkhoff and derivative
// control along the anchor orbit, found by exhaustive enumeration.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "blendlab/model.hpp"
#include "blendlab/symbolic.hpp"
#include "json.hpp"

namespace blendlab {

struct SkeletonParams {
    std::size_t m = 16;
    double eps = 0.01;  // separation scale
    double eps_H = 0.15;
    double eps_E = 0.15;
    double eps_B = 0.14;
    double K0 = 2.0;
    double L0 = 2.0;
    double eps_D_ss = 1e-3;
    double eps_D_uu = 1e-3;
    double eps_D = 1e-3;

    double eps2() const { return 2.0 * eps_E + eps_D_ss + eps_D_uu + eps_D; }
    double eps1() const { return eps2() + eps_D_ss; }
    void validate() const;
    nlohmann::json to_json() const;
    static SkeletonParams from_json(const nlohmann::json& j);
};

// Potentials used for Birkhoff control: symbol-0 frequency, symbol-2
// frequency, and the blender-domain indicator of the fiber coordinate.
inline constexpr std::size_t kSkeletonPotentials = 3;
double skeleton_potential(const SkewProductSystem& sys, std::size_t j, Symbol s, double x);
// Their integrals against a Bernoulli measure sitting on the anchor.
std::vector<double> skeleton_potential_means(const SkewProductSystem& sys, const BernoulliModel& mu);

struct WordCertificate {
    double derivative_slack = 0.0;  // min over l of (log K0 + l eps_E) - |S_l - l alpha|
    double birkhoff_slack = 0.0;    // same for the Birkhoff envelopes, over all potentials
    double max_derivative_dev = 0.0;
    double max_birkhoff_dev = 0.0;
};

struct Skeleton {
    std::vector<Word> words;
    SkeletonParams params;
    BernoulliModel target;
    std::vector<WordCertificate> certificates;

    std::size_t card() const { return words.size(); }
    nlohmann::json to_json() const;
};

// Lower bound L0^{-1} e^{m (h - eps_H)} on the cardinality.
double skeleton_card_bound(const SkeletonParams& p, double h);

Skeleton extract(const SkewProductSystem& sys, const BernoulliModel& mu, const SkeletonParams& params,
                 unsigned jobs = 1);

// Recomputes every envelope from fresh cocycles along the anchor orbit.
// Throws naming the word and prefix length on a violation.
std::vector<WordCertificate> certify(const SkewProductSystem& sys, const Skeleton& sk);

// Least m in [m_lo, m_hi] for which extraction succeeds, or 0.
std::size_t least_admissible_m(const SkewProductSystem& sys, const BernoulliModel& mu, SkeletonParams params,
                               std::size_t m_lo, std::size_t m_hi, unsigned jobs = 1);

void write_words(std::ostream& os, const std::vector<Word>& words);

}  // namespace blendlab
