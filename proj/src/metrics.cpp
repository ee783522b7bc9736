#include "blendlab/metrics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "blendlab/error.hpp"

namespace blendlab {

double PotentialFamily::evaluate(const SkewProductSystem& sys, std::size_t j, Symbol s, double x) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    switch (j) {
        case 0: return s == 0 ? 1.0 : 0.0;
        case 1: return s == 2 ? 1.0 : 0.0;
        case 2: return sys.blender().domain().contains(x) ? 1.0 : 0.0;
        case 3: return std::log(std::abs(sys.map(s).derivative(x)));
        case 4: return std::sin(two_pi * x);
        case 5: return std::cos(two_pi * x);
    }
    throw Error("no such potential");
}

PotentialFamily default_family(const SkewProductSystem& sys) {
    PotentialFamily f;
    f.version = kFamilyVersion;
    f.names = {"freq0", "freq2", "blender_domain", "log_slope", "sin", "cos"};
    const double log_norm = std::max(std::abs(std::log(sys.min_slope())), std::abs(std::log(sys.max_slope())));
    f.sup_norms = {1.0, 1.0, 1.0, log_norm, 1.0, 1.0};
    for (std::size_t j = 1; j <= f.names.size(); ++j) f.weights.push_back(std::ldexp(1.0, -static_cast<int>(j)));
    f.tail = std::ldexp(1.0, -static_cast<int>(f.names.size()));
    return f;
}

Integrals bernoulli_integrals(const SkewProductSystem& sys, const PotentialFamily& fam, const BernoulliModel& mu,
                              std::uint64_t seed, std::size_t samples) {
    if (mu.alphabet() != sys.k()) throw Error("measure and system alphabets differ");
    const auto support = mu.support();
    bool anchored = true;
    for (Symbol s : support) anchored = anchored && sys.fixes_anchor(s);

    Integrals out(fam.size(), 0.0);
    if (anchored) {
        for (std::size_t j = 0; j < fam.size(); ++j)
            for (Symbol s : support) out[j] += mu.weights()[s] * fam.evaluate(sys, j, s, sys.anchor());
        return out;
    }
    if (samples == 0) throw Error("no samples");
    std::mt19937_64 rng(seed);
    std::discrete_distribution<int> pick(mu.weights().begin(), mu.weights().end());
    double x = sys.anchor();
    for (std::size_t i = 0; i < samples; ++i) {
        const Symbol s = static_cast<Symbol>(pick(rng));
        for (std::size_t j = 0; j < fam.size(); ++j) out[j] += fam.evaluate(sys, j, s, x);
        x = sys.map(s)(x);
    }
    for (double& v : out) v /= static_cast<double>(samples);
    return out;
}

Integrals orbit_integrals(const SkewProductSystem& sys, const PotentialFamily& fam, const Word& w, double x0) {
    if (w.empty()) throw Error("empty word");
    Integrals out(fam.size(), 0.0);
    double x = wrap01(x0);
    for (Symbol s : w.symbols()) {
        for (std::size_t j = 0; j < fam.size(); ++j) out[j] += fam.evaluate(sys, j, s, x);
        x = sys.map(s)(x);
    }
    for (double& v : out) v /= static_cast<double>(w.length());
    return out;
}

Distance weakstar_distance(const Integrals& nu, const Integrals& mu, const PotentialFamily& fam) {
    if (nu.size() != fam.size() || mu.size() != fam.size()) throw Error("integrals do not match the family");
    Distance d;
    for (std::size_t j = 0; j < fam.size(); ++j)
        d.value += fam.weights[j] / (2.0 * fam.sup_norms[j]) * std::abs(nu[j] - mu[j]);
    d.tail = fam.tail;
    return d;
}

double birkhoff_average(const SkewProductSystem& sys, const Word& w, const Potential& phi, double x0) {
    if (w.empty()) throw Error("empty word");
    double acc = 0.0;
    double x = wrap01(x0);
    for (Symbol s : w.symbols()) {
        acc += phi(s, x);
        x = sys.map(s)(x);
    }
    return acc / static_cast<double>(w.length());
}

double birkhoff_average(const SkewProductSystem& sys, const Word& w, const Potential& phi) {
    return birkhoff_average(sys, w, phi, sys.anchor());
}

}  // namespace blendlab
