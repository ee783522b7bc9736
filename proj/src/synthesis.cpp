#include "blendlab/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <unordered_set>

#include "blendlab/error.hpp"
#include "blendlab/parallel.hpp"

namespace blendlab {

std::string to_string(Mode m) { return m == Mode::A ? "A" : "B"; }

namespace {

Word repeat(Symbol s, std::size_t n, unsigned k) { return Word(std::vector<Symbol>(n, s), k); }

// Shifts a lift by an integer so that its left end lies in [ref, ref + 1).
Arc into_frame(const Arc& a, double ref) {
    const double n = std::floor(a.lo - ref);
    return {a.lo - n, a.hi - n};
}

// Fixed point of the lifted return map on a rectangle mapped onto the target.
// Iterates the inverse branch, which contracts; bisecting the forward map
// loses every digit once the return expands by more than about 1e12.
double return_fixed_point(const SkewProductSystem& sys, const Word& w, const Arc& rect, const Arc& target) {
    const Arc r = into_frame(rect, target.lo);
    auto pull = [&](double y) {
        for (std::size_t i = w.length(); i-- > 0;) y = sys.map(w[i]).inverse_lift(y);
        return y;
    };
    const double n = std::round(pull(target.mid()) - r.mid());
    double x = target.mid();
    for (int i = 0; i < 10000; ++i) {
        const double a = pull(x) - n;
        const double b = pull(a) - n;
        // Aitken step: exact when the branch is affine across the iterates.
        const double d2 = b - 2.0 * a + x;
        double next = d2 != 0.0 ? x - (a - x) * (a - x) / d2 : b;
        if (!(next >= r.lo && next <= r.hi)) next = b;
        if (next == x || pull(next) - n == next) {
            x = next;
            break;
        }
        x = next;
    }
    const double slack = 1e-12 * std::max(1.0, r.width());
    if (x < r.lo - slack || x > r.hi + slack) throw Error("return map does not cross the rectangle");
    return x;
}

double orbit_exponent(const SkewProductSystem& sys, const Word& w, double x) {
    return cocycle(sys.maps(), w, x).final_log() / static_cast<double>(w.length());
}

Word concat_all(const HorseshoeSpec& hs, const std::vector<std::size_t>& idx) {
    std::vector<Symbol> out;
    for (std::size_t i : idx) {
        const auto s = hs.cycle_words.at(i).symbols();
        out.insert(out.end(), s.begin(), s.end());
    }
    return Word(std::move(out), hs.cycle_words.at(idx.at(0)).alphabet());
}

}  // namespace

HorseshoeSpec synthesize(const SkewProductSystem& sys, const Skeleton& sk, const AccessibilityReport& access,
                         const ModeSpec& mode, unsigned jobs) {
    if (sk.card() == 0) throw Error("empty skeleton");
    const BlenderSpec& b = sys.blender();
    const unsigned k = sys.k();
    const std::size_t m = sk.params.m;

    HorseshoeSpec hs;
    hs.mode = mode;
    hs.m = m;
    hs.target = access.target;
    hs.delta_c = mode.mode == Mode::A ? std::exp(-static_cast<double>(m) * std::sqrt(sk.params.eps1()))
                                      : std::exp(-static_cast<double>(m) * mode.beta);
    hs.anchor_interval = {sys.anchor(), sys.anchor() + hs.delta_c};

    // Symbols that fix the anchor and expand / contract there.
    const auto logs = sys.anchor_log_slopes();
    Symbol expanding = k, contracting = k;
    for (unsigned s = 0; s < k; ++s) {
        if (!sys.fixes_anchor(static_cast<Symbol>(s))) continue;
        if (logs[s] > 0.0 && expanding == k) expanding = static_cast<Symbol>(s);
        if (logs[s] < 0.0 && contracting == k) contracting = static_cast<Symbol>(s);
    }
    if (expanding == k || contracting == k) throw Error("no expanding and contracting symbol at the anchor");

    // Skeleton images of I_0 all start at the anchor; one connect-out word
    // serves their hull.
    std::vector<Arc> Im(sk.card());
    parallel_for(sk.card(), jobs, [&](std::size_t i) { Im[i] = sys.image(sk.words[i], hs.anchor_interval); });
    Arc hull = hs.anchor_interval;
    for (const Arc& a : Im) {
        const Arc f = into_frame(a, hs.anchor_interval.lo - 0.5);
        hull.lo = std::min(hull.lo, f.lo);
        hull.hi = std::max(hull.hi, f.hi);
    }

    const Word in = connecting_word(sys, hs.anchor_interval, hs.target, Direction::Backward, 64, 1u << 20,
                                    access.t_con);
    const Word out = connecting_word(sys, hull, hs.target, Direction::Forward, 64, 1u << 20, access.t_con);
    hs.t_con = std::max({access.t_con, in.length(), out.length()});
    // Padding after the connect-in word with the expanding symbol keeps I_0
    // inside the image of the target; padding before the connect-out word
    // with the contracting symbol keeps the hull inside itself.
    const Word in_p = in.concat(repeat(expanding, hs.t_con - in.length(), k));
    const Word out_p = repeat(contracting, hs.t_con - out.length(), k).concat(out);
    if (!sys.image(in_p, hs.target).contains(hs.anchor_interval))
        throw Error("padded connect-in word lost the anchor interval");
    if (!hs.target.contains(sys.image(out_p, hull))) throw Error("padded connect-out word misses the target");

    const std::size_t n = sk.card();
    std::vector<CoveringReport> covers(n, CoveringReport{Word({}, k), UStrip(0.0, 1.0, k), {}, 0, 0, 0, 0});
    parallel_for(n, jobs, [&](std::size_t i) {
        const Arc S = into_frame(sys.image(out_p, Im[i]), hs.target.lo);
        covers[i] = cover(b, UStrip(S, Word({}, k)));
    });
    hs.ell = 0;
    hs.cover_lengths.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        hs.cover_lengths[i] = covers[i].ell_measured;
        hs.ell = std::max(hs.ell, covers[i].ell_measured);
    }
    hs.N = 2 * hs.t_con + m + hs.ell;

    hs.cycle_words.resize(n);
    hs.components.resize(n);
    hs.rectangles.resize(n);
    hs.periodic_points.resize(n);
    hs.exponents.resize(n);
    parallel_for(n, jobs, [&](std::size_t i) {
        const Word bw = covers[i].steps.concat(repeat(b.leg_a, hs.ell - covers[i].ell_measured, k));
        CycleComponents c{in_p, sk.words[i], out_p, bw};
        const Word cyc = in_p.concat(sk.words[i]).concat(out_p).concat(bw);
        const Arc R = sys.preimage(cyc, hs.target);
        if (!hs.target.contains(R)) throw Error("rectangle escapes the target");
        // The blender segment must act by the leg laws.
        const Arc P = into_frame(sys.image(in_p.concat(sk.words[i]).concat(out_p), R), b.domain().lo);
        replay_legs(b, P, bw);
        const double x = return_fixed_point(sys, cyc, R, hs.target);
        hs.cycle_words[i] = cyc;
        hs.components[i] = std::move(c);
        hs.rectangles[i] = into_frame(R, hs.target.lo);
        hs.periodic_points[i] = wrap01(x);
        hs.exponents[i] = orbit_exponent(sys, cyc, x);
    });

    std::vector<Word> sorted = hs.cycle_words;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw Error("duplicate cycle words");

    hs.entropy_estimate = std::log(static_cast<double>(n)) / static_cast<double>(hs.N);
    const auto [lo, hi] = std::minmax_element(hs.exponents.begin(), hs.exponents.end());
    hs.exponent_min = *lo;
    hs.exponent_max = *hi;
    return hs;
}

nlohmann::json HorseshoeSpec::to_json(bool include_words) const {
    nlohmann::json j = {{"mode", to_string(mode.mode)},
                        {"beta", mode.beta},
                        {"delta", mode.delta},
                        {"m", m},
                        {"t_con", t_con},
                        {"ell", ell},
                        {"N", N},
                        {"card", card()},
                        {"delta_c", delta_c},
                        {"target", {target.lo, target.hi}},
                        {"anchor_interval", {anchor_interval.lo, anchor_interval.hi}},
                        {"entropy_estimate", entropy_estimate},
                        {"exponent_window", {exponent_min, exponent_max}}};
    if (include_words) {
        nlohmann::json cyc = nlohmann::json::array();
        for (std::size_t i = 0; i < card(); ++i)
            cyc.push_back({{"word", cycle_words[i].str()},
                           {"in", components[i].in.str()},
                           {"skeleton", components[i].skeleton.str()},
                           {"out", components[i].out.str()},
                           {"blender", components[i].blender.str()},
                           {"cover_length", cover_lengths[i]},
                           {"rectangle", {rectangles[i].lo, rectangles[i].hi}},
                           {"periodic_point", periodic_points[i]},
                           {"exponent", exponents[i]}});
        j["cycles"] = std::move(cyc);
    }
    return j;
}

PeriodicMeasure periodic_measure(const SkewProductSystem& sys, const HorseshoeSpec& hs,
                                 const std::vector<std::size_t>& indices) {
    if (indices.empty()) throw Error("empty word");
    PeriodicMeasure pm;
    pm.word = concat_all(hs, indices);
    const Arc R = sys.preimage(pm.word, hs.target);
    const double x = return_fixed_point(sys, pm.word, R, hs.target);
    pm.point = wrap01(x);
    pm.frequencies = word_frequency(pm.word);
    pm.exponent = orbit_exponent(sys, pm.word, x);
    return pm;
}

PeriodicMeasure periodic_measure(const SkewProductSystem& sys, const HorseshoeSpec& hs, std::size_t index) {
    if (index >= hs.card()) throw Error("cycle index out of range");
    return periodic_measure(sys, hs, std::vector<std::size_t>{index});
}

bool replay_concatenation(const SkewProductSystem& sys, const HorseshoeSpec& hs,
                          const std::vector<std::size_t>& indices) {
    if (indices.empty()) return false;
    const BlenderSpec& b = sys.blender();
    // Points following the whole concatenation, pulled back from the target.
    Arc X = hs.target;
    for (std::size_t j = indices.size(); j-- > 0;) {
        X = sys.preimage(hs.cycle_words.at(indices[j]), X);
        if (!(X.width() > 0.0) || !hs.rectangles[indices[j]].contains(into_frame(X, hs.target.lo))) return false;
    }
    const std::size_t blender_start = 2 * hs.t_con + hs.m;
    double x = X.mid();
    for (std::size_t i : indices) {
        if (!hs.rectangles[i].contains(x)) return false;
        const Word& w = hs.cycle_words[i];
        for (std::size_t p = 0; p < w.length(); ++p) {
            if (p >= blender_start && !b.domain().contains(x)) return false;
            x = sys.map(w[p])(x);
        }
    }
    return hs.target.contains(x);
}

BlockEntropy block_count_entropy(const HorseshoeSpec& hs, std::size_t depth, std::uint64_t seed) {
    if (depth == 0 || hs.card() == 0) throw Error("block depth and card must be positive");
    BlockEntropy r;
    r.depth = depth;
    const double card = static_cast<double>(hs.card());
    const double total = std::pow(card, static_cast<double>(depth));
    auto block_hash = [&](const std::vector<std::size_t>& idx) {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::size_t i : idx)
            for (Symbol s : hs.cycle_words[i].symbols()) h = (h ^ s) * 1099511628211ULL;
        return h;
    };
    std::unordered_set<std::uint64_t> seen;
    std::vector<std::size_t> idx(depth, 0);
    if (total <= static_cast<double>(kExplicitBlockLimit)) {
        r.explicit_count = true;
        for (;;) {
            seen.insert(block_hash(idx));
            std::size_t d = depth;
            while (d > 0 && ++idx[d - 1] == hs.card()) idx[--d] = 0;
            if (d == 0) break;
        }
        r.value = std::log(static_cast<double>(seen.size())) / static_cast<double>(depth * hs.N);
        return r;
    }
    // Equal-length distinct words form a uniquely decodable code, so aligned
    // blocks number card^depth; spot-check injectivity on random tuples.
    std::vector<Word> sorted = hs.cycle_words;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw Error("duplicate cycle words");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, hs.card() - 1);
    std::set<std::vector<std::size_t>> tuples;
    for (std::size_t t = 0; t < (std::size_t{1} << 16); ++t) {
        for (auto& i : idx) i = pick(rng);
        if (tuples.insert(idx).second && !seen.insert(block_hash(idx)).second)
            throw Error("distinct cycle tuples produced equal blocks");
    }
    r.value = static_cast<double>(depth) * std::log(card) / static_cast<double>(depth * hs.N);
    return r;
}

double exponent_floor(const SkewProductSystem& sys, const HorseshoeSpec& hs, const SkeletonParams& p) {
    const double num = -std::log(p.K0) - static_cast<double>(hs.m) * p.eps1() +
                       2.0 * static_cast<double>(hs.t_con) * std::log(sys.min_slope()) +
                       static_cast<double>(hs.ell) * std::log(sys.blender().lambda_bh());
    return num / static_cast<double>(hs.N);
}

bool VerificationReport::pass() const {
    return entropy_ok && block_ok && exponents_positive && exponent_window_ok && floor_ok && weakstar_ok &&
           legality_ok;
}

VerificationReport verify(const SkewProductSystem& sys, const HorseshoeSpec& hs, const Skeleton& sk,
                          const BernoulliModel& mu, const ModeSpec& mode, const VerifyOptions& opt) {
    VerificationReport r;
    r.mode = mode.mode;
    r.m = hs.m;
    r.N = hs.N;
    r.ell = hs.ell;
    r.card = hs.card();
    r.t_con = hs.t_con;

    const SkeletonParams& p = sk.params;
    const double N = static_cast<double>(hs.N);
    const double m = static_cast<double>(hs.m);
    const double h = mu.entropy();
    const double logL0 = std::abs(std::log(p.L0));
    r.entropy_lower = (m * (h - p.eps_H) - logL0) / N;
    r.entropy_upper = (m * (h + p.eps_H) + logL0) / N;
    r.entropy_estimate = hs.entropy_estimate;
    r.entropy_ok = r.entropy_lower <= r.entropy_estimate && r.entropy_estimate <= r.entropy_upper;
    r.block = block_count_entropy(hs, opt.block_depth, opt.seed);
    r.block_ok = std::abs(r.block.value - r.entropy_estimate) <= 0.01 * std::max(r.entropy_estimate, 1e-12) ||
                 (r.entropy_estimate == 0.0 && r.block.value == 0.0);

    r.exponent_min = hs.exponent_min;
    r.exponent_max = hs.exponent_max;
    r.exponents_positive = hs.exponent_min > 0.0;
    r.exponent_floor = exponent_floor(sys, hs, p);
    const double alpha = mu.exponent();
    const double K = 1.0 / std::log(sys.blender().lambda_bh());
    if (mode.mode == Mode::A) {
        r.window_lo = 0.0;
        r.window_hi = mode.delta;
        r.exponent_window_ok = hs.exponent_max < mode.delta;
        r.D_bound = 4.0 * p.eps_B;
    } else {
        const double spread = mode.beta + std::abs(alpha);
        r.window_lo = mode.beta / (1.0 + K * spread) - mode.delta;
        r.window_hi = mode.beta / (1.0 + spread / std::log(sys.max_slope())) + mode.delta;
        r.exponent_window_ok = hs.exponent_min >= r.window_lo && hs.exponent_max <= r.window_hi;
        r.D_bound = K * spread / (1.0 + K * spread) + mode.delta;
    }
    r.floor_ok = hs.exponent_min >= r.exponent_floor;

    const PotentialFamily fam = default_family(sys);
    r.family_version = fam.version;
    r.tail = fam.tail;
    const Integrals target = bernoulli_integrals(sys, fam, mu, opt.seed);
    r.D_self = weakstar_distance(target, target, fam).value;

    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, hs.card() - 1);
    std::uniform_int_distribution<std::size_t> len(1, std::max<std::size_t>(opt.max_concat, 1));
    std::vector<std::vector<std::size_t>> samples;
    const std::size_t ns = std::min(opt.samples, hs.card() == 1 ? std::size_t{1} : opt.samples);
    for (std::size_t s = 0; s < ns; ++s) {
        std::vector<std::size_t> idx(s == 0 ? 1 : len(rng));
        for (auto& i : idx) i = pick(rng);
        samples.push_back(std::move(idx));
    }
    r.distances.assign(samples.size(), 0.0);
    parallel_for(samples.size(), opt.jobs, [&](std::size_t s) {
        const PeriodicMeasure pm = periodic_measure(sys, hs, samples[s]);
        r.distances[s] = weakstar_distance(orbit_integrals(sys, fam, pm.word, pm.point), target, fam).value;
    });
    r.D_max = *std::max_element(r.distances.begin(), r.distances.end());
    r.weakstar_ok = r.D_max < r.D_bound && r.D_self == 0.0;

    std::vector<double> dev(hs.card(), 0.0);
    parallel_for(hs.card(), opt.jobs, [&](std::size_t i) {
        const Integrals own = orbit_integrals(sys, fam, hs.cycle_words[i], hs.periodic_points[i]);
        for (std::size_t j = 0; j < fam.size(); ++j) dev[i] = std::max(dev[i], std::abs(own[j] - target[j]));
    });
    r.birkhoff_dev_max = *std::max_element(dev.begin(), dev.end());
    r.birkhoff_bound = 3.0 * p.eps_B;

    std::vector<std::vector<std::size_t>> concat(opt.legality_checks);
    std::uniform_int_distribution<std::size_t> clen(1, std::max<std::size_t>(opt.legality_max_len, 1));
    for (auto& c : concat) {
        c.resize(clen(rng));
        for (auto& i : c) i = pick(rng);
    }
    std::vector<char> ok(concat.size(), 0);
    parallel_for(concat.size(), opt.jobs, [&](std::size_t i) { ok[i] = replay_concatenation(sys, hs, concat[i]); });
    r.legality_checked = concat.size();
    r.legality_ok = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
    return r;
}

nlohmann::json VerificationReport::to_json() const {
    return {{"mode", to_string(mode)},
            {"family_version", family_version},
            {"m", m},
            {"N", N},
            {"ell", ell},
            {"card", card},
            {"t_con", t_con},
            {"entropy", {{"lower", entropy_lower}, {"estimate", entropy_estimate}, {"upper", entropy_upper},
                         {"block", block.value}, {"block_depth", block.depth},
                         {"block_explicit", block.explicit_count}}},
            {"exponents", {{"min", exponent_min}, {"max", exponent_max}, {"floor", exponent_floor},
                           {"window", {window_lo, window_hi}}}},
            {"weakstar", {{"distances", distances}, {"D_max", D_max}, {"bound", D_bound}, {"self", D_self},
                          {"tail", tail}}},
            {"birkhoff", {{"max_dev", birkhoff_dev_max}, {"bound", birkhoff_bound}}},
            {"legality_checked", legality_checked},
            {"flags", {{"entropy", entropy_ok}, {"block", block_ok}, {"exponents_positive", exponents_positive},
                       {"exponent_window", exponent_window_ok}, {"floor", floor_ok}, {"weakstar", weakstar_ok},
                       {"legality", legality_ok}}},
            {"pass", pass()}};
}

std::string to_csv_row(const VerificationReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%.17g,%.17g,%.17g,%.17g,%d\n", r.m, r.N, r.ell, r.card,
                  r.entropy_estimate, r.exponent_min, r.exponent_max, r.D_max, r.pass() ? 1 : 0);
    return buf;
}

}  // namespace blendlab
