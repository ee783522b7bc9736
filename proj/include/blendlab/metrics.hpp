#pragma once

// Fixed potential family, integrals of it against Bernoulli measures and
// periodic orbits, and the weighted weak* distance built from them.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "blendlab/model.hpp"
#include "blendlab/symbolic.hpp"

namespace blendlab {

struct PotentialFamily {
    std::string version;
    std::vector<std::string> names;
    std::vector<double> sup_norms;
    std::vector<double> weights;  // 2^{-j}, j = 1..J
    double tail = 0.0;            // 2^{-J}

    std::size_t size() const { return names.size(); }
    double evaluate(const SkewProductSystem& sys, std::size_t j, Symbol s, double x) const;
};

inline constexpr const char* kFamilyVersion = "phi6-v1";

// [s==0], [s==2], blender-domain indicator, log|slope|, sin 2 pi x, cos 2 pi x.
PotentialFamily default_family(const SkewProductSystem& sys);

using Integrals = std::vector<double>;

inline constexpr std::size_t kMeasureSamples = std::size_t{1} << 14;

// Exact when every charged symbol fixes the anchor (the measure is then
// the Bernoulli measure times the anchor point mass); otherwise averaged
// over a seeded random orbit of `samples` steps from the anchor.
Integrals bernoulli_integrals(const SkewProductSystem& sys, const PotentialFamily& fam, const BernoulliModel& mu,
                              std::uint64_t seed = 1, std::size_t samples = kMeasureSamples);

// Averages over one period of the orbit of x0 under the periodic extension of w.
Integrals orbit_integrals(const SkewProductSystem& sys, const PotentialFamily& fam, const Word& w, double x0);

struct Distance {
    double value = 0.0;
    double tail = 0.0;  // bound on the truncated terms
};

Distance weakstar_distance(const Integrals& nu, const Integrals& mu, const PotentialFamily& fam);

using Potential = std::function<double(Symbol, double)>;

double birkhoff_average(const SkewProductSystem& sys, const Word& w, const Potential& phi);
double birkhoff_average(const SkewProductSystem& sys, const Word& w, const Potential& phi, double x0);

}  // namespace blendlab
