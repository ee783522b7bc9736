#include "blendlab/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "blendlab/error.hpp"
#include "blendlab/kernels.hpp"
#include "blendlab/parallel.hpp"

namespace blendlab {

void SkeletonParams::validate() const {
    if (m == 0) throw Error("m must be positive");
    for (double v : {eps, eps_H, eps_E, eps_B, eps_D_ss, eps_D_uu, eps_D})
        if (!(v > 0.0)) throw Error("skeleton tolerances must be positive");
    if (!(K0 >= 1.0) || !(L0 >= 1.0)) throw Error("K0 and L0 must be at least 1");
}

nlohmann::json SkeletonParams::to_json() const {
    return {{"m", m},         {"eps", eps},           {"eps_H", eps_H},       {"eps_E", eps_E},
            {"eps_B", eps_B}, {"K0", K0},             {"L0", L0},             {"eps_D_ss", eps_D_ss},
            {"eps_D_uu", eps_D_uu}, {"eps_D", eps_D}, {"eps1", eps1()},       {"eps2", eps2()}};
}

SkeletonParams SkeletonParams::from_json(const nlohmann::json& j) {
    SkeletonParams p;
    p.m = j.at("m").get<std::size_t>();
    p.eps = j.at("eps").get<double>();
    p.eps_H = j.at("eps_H").get<double>();
    p.eps_E = j.at("eps_E").get<double>();
    p.eps_B = j.at("eps_B").get<double>();
    p.K0 = j.at("K0").get<double>();
    p.L0 = j.at("L0").get<double>();
    p.eps_D_ss = j.at("eps_D_ss").get<double>();
    p.eps_D_uu = j.at("eps_D_uu").get<double>();
    p.eps_D = j.at("eps_D").get<double>();
    return p;
}

double skeleton_potential(const SkewProductSystem& sys, std::size_t j, Symbol s, double x) {
    switch (j) {
        case 0: return s == 0 ? 1.0 : 0.0;
        case 1: return s == 2 ? 1.0 : 0.0;
        case 2: return sys.blender().domain().contains(x) ? 1.0 : 0.0;
    }
    throw Error("no such skeleton potential");
}

std::vector<double> skeleton_potential_means(const SkewProductSystem& sys, const BernoulliModel& mu) {
    const auto& p = mu.weights();
    return {p.size() > 0 ? p[0] : 0.0, p.size() > 2 ? p[2] : 0.0,
            sys.blender().domain().contains(sys.anchor()) ? 1.0 : 0.0};
}

double skeleton_card_bound(const SkeletonParams& p, double h) {
    return std::exp(static_cast<double>(p.m) * (h - p.eps_H)) / p.L0;
}

namespace {

// Envelope bookkeeping for words that stay on the anchor, where every
// increment is a per-symbol constant.
struct AnchorEnvelope {
    std::vector<double> log_slope;                 // per symbol
    std::vector<std::vector<double>> potential;    // [j][symbol]
    std::vector<double> mean;                      // per potential
    double alpha = 0.0;
    double logK0 = 0.0;
    SkeletonParams p;

    AnchorEnvelope(const SkewProductSystem& sys, const BernoulliModel& mu, const SkeletonParams& params)
        : log_slope(sys.anchor_log_slopes()), mean(skeleton_potential_means(sys, mu)),
          alpha(mu.exponent()), logK0(std::log(params.K0)), p(params) {
        potential.assign(kSkeletonPotentials, std::vector<double>(sys.k()));
        for (std::size_t j = 0; j < kSkeletonPotentials; ++j)
            for (unsigned s = 0; s < sys.k(); ++s)
                potential[j][s] = skeleton_potential(sys, j, static_cast<Symbol>(s), sys.anchor());
    }

    WordCertificate measure(std::span<const Symbol> w) const {
        WordCertificate c;
        c.derivative_slack = logK0;
        c.birkhoff_slack = p.K0;
        double S = 0.0;
        double B[kSkeletonPotentials] = {};
        for (std::size_t l = 1; l <= w.size(); ++l) {
            const Symbol s = w[l - 1];
            const double dl = static_cast<double>(l);
            S += log_slope[s];
            const double dev = std::abs(S - dl * alpha);
            c.max_derivative_dev = std::max(c.max_derivative_dev, dev);
            c.derivative_slack = std::min(c.derivative_slack, (logK0 + dl * p.eps_E) - dev);
            for (std::size_t j = 0; j < kSkeletonPotentials; ++j) {
                B[j] += potential[j][s];
                const double bdev = std::abs(B[j] - dl * mean[j]);
                c.max_birkhoff_dev = std::max(c.max_birkhoff_dev, bdev);
                c.birkhoff_slack = std::min(c.birkhoff_slack, (p.K0 + dl * p.eps_B) - bdev);
            }
        }
        return c;
    }

    bool frequencies_ok(std::span<const Symbol> w, const std::vector<double>& weights) const {
        std::vector<double> count(weights.size(), 0.0);
        for (Symbol s : w) count[s] += 1.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            if (std::abs(count[i] / static_cast<double>(w.size()) - weights[i]) > p.eps_B) return false;
        return true;
    }
};

}  // namespace

Skeleton extract(const SkewProductSystem& sys, const BernoulliModel& mu, const SkeletonParams& params,
                 unsigned jobs) {
    params.validate();
    if (mu.alphabet() != sys.k()) throw Error("measure and system alphabets differ");
    if (params.eps > sys.min_piece_length())
        throw Error("separation scale exceeds the minimal piece length");
    const std::vector<Symbol> support = mu.support();
    for (Symbol s : support)
        if (!sys.fixes_anchor(s)) throw Error("measure charges a symbol that moves the anchor");

    const AnchorEnvelope env(sys, mu, params);
    WordFilter filter;
    filter.prefix_ok = [&](std::span<const Symbol> w) {
        const WordCertificate c = env.measure(w);
        return c.derivative_slack >= 0.0 && c.birkhoff_slack >= 0.0;
    };
    filter.accept = [&](std::span<const Symbol> w) {
        return filter.prefix_ok(w) && env.frequencies_ok(w, mu.weights());
    };

    Skeleton sk{enumerate_words(params.m, sys.k(), filter, support, kDefaultEnumerationCap, jobs), params, mu, {}};
    if (static_cast<double>(sk.card()) < skeleton_card_bound(params, mu.entropy()))
        throw Error("skeleton too small: increase m or tolerances");
    sk.certificates.resize(sk.card());
    parallel_for(sk.card(), jobs, [&](std::size_t i) { sk.certificates[i] = env.measure(sk.words[i].symbols()); });
    return sk;
}

std::vector<WordCertificate> certify(const SkewProductSystem& sys, const Skeleton& sk) {
    const std::size_t n = sk.card();
    if (n == 0) return {};
    const std::size_t m = sk.words[0].length();
    const SkeletonParams& p = sk.params;
    const double alpha = sk.target.exponent();
    const std::vector<double> means = skeleton_potential_means(sys, sk.target);

    std::vector<double> deriv(n * m);
    std::vector<std::vector<double>> pot(kSkeletonPotentials, std::vector<double>(n * m));
    for (std::size_t w = 0; w < n; ++w) {
        if (sk.words[w].length() != m) throw Error("skeleton words differ in length");
        const CocycleProduct c = cocycle(sys.maps(), sk.words[w], sys.anchor());
        double x = sys.anchor();
        for (std::size_t l = 0; l < m; ++l) {
            const Symbol s = sk.words[w][l];
            deriv[w * m + l] = c.partial_logs[l + 1] - c.partial_logs[l];
            for (std::size_t j = 0; j < kSkeletonPotentials; ++j) pot[j][w * m + l] = skeleton_potential(sys, j, s, x);
            x = sys.map(s)(x);
        }
    }

    std::vector<WordCertificate> out(n);
    std::vector<double> slack(n);
    auto check = [&](const std::vector<double>& inc, double center, double c0, double c1, const char* what) {
        kernels::envelope_min_slack(inc, n, m, center, c0, c1, slack);
        for (std::size_t w = 0; w < n; ++w) {
            if (slack[w] >= 0.0) continue;
            double S = 0.0;
            std::size_t bad = m;
            for (std::size_t l = 1; l <= m && bad == m; ++l) {
                S += inc[w * m + l - 1];
                if ((c0 + static_cast<double>(l) * c1) - std::abs(S - static_cast<double>(l) * center) < 0.0) bad = l;
            }
            throw Error(std::string(what) + " envelope violated by word " + sk.words[w].str() + " at prefix length " +
                        std::to_string(bad));
        }
    };

    check(deriv, alpha, std::log(p.K0), p.eps_E, "derivative");
    for (std::size_t w = 0; w < n; ++w) out[w].derivative_slack = slack[w];
    for (std::size_t w = 0; w < n; ++w) out[w].birkhoff_slack = p.K0;
    for (std::size_t j = 0; j < kSkeletonPotentials; ++j) {
        check(pot[j], means[j], p.K0, p.eps_B, "Birkhoff");
        for (std::size_t w = 0; w < n; ++w) out[w].birkhoff_slack = std::min(out[w].birkhoff_slack, slack[w]);
    }
    // Deviations are the c1 = 0, c0 = 0 slacks with the sign flipped.
    kernels::envelope_min_slack(deriv, n, m, alpha, 0.0, 0.0, slack);
    for (std::size_t w = 0; w < n; ++w) out[w].max_derivative_dev = -slack[w];
    for (std::size_t j = 0; j < kSkeletonPotentials; ++j) {
        kernels::envelope_min_slack(pot[j], n, m, means[j], 0.0, 0.0, slack);
        for (std::size_t w = 0; w < n; ++w) out[w].max_birkhoff_dev = std::max(out[w].max_birkhoff_dev, -slack[w]);
    }
    return out;
}

std::size_t least_admissible_m(const SkewProductSystem& sys, const BernoulliModel& mu, SkeletonParams params,
                               std::size_t m_lo, std::size_t m_hi, unsigned jobs) {
    for (std::size_t m = m_lo; m <= m_hi; ++m) {
        params.m = m;
        try {
            extract(sys, mu, params, jobs);
            return m;
        } catch (const Error& e) {
            if (std::string(e.what()) != "skeleton too small: increase m or tolerances") throw;
        }
    }
    return 0;
}

nlohmann::json Skeleton::to_json() const {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& x : words) w.push_back(x.str());
    nlohmann::json c = nlohmann::json::array();
    for (const auto& x : certificates)
        c.push_back({{"derivative_slack", x.derivative_slack},
                     {"birkhoff_slack", x.birkhoff_slack},
                     {"max_derivative_dev", x.max_derivative_dev},
                     {"max_birkhoff_dev", x.max_birkhoff_dev}});
    return {{"params", params.to_json()}, {"target", target.to_json()}, {"card", card()}, {"words", w},
            {"certificates", c}};
}

void write_words(std::ostream& os, const std::vector<Word>& words) {
    for (const auto& w : words) os << w.str() << '\n';
}

}  // namespace blendlab
