#include "blendlab/blender.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "blendlab/error.hpp"

namespace blendlab {

BlenderSpec::BlenderSpec(double lambda_, double eps_, double delta_, Symbol a, Symbol b, unsigned k)
    : lambda(lambda_), eps(eps_), delta(delta_), leg_a(a), leg_b(b), alphabet(k) {
    if (!(lambda > 1.0 && lambda < 2.0)) throw Error("blender needs 1 < lambda < 2");
    if (!(eps > 0.0)) throw Error("blender needs eps > 0");
    if (!(delta > 0.0)) throw Error("blender needs delta > 0");
    if (leg_a == leg_b || leg_a >= alphabet || leg_b >= alphabet) throw Error("bad leg symbols");
}

nlohmann::json BlenderSpec::to_json() const {
    return {{"lambda", lambda},   {"eps", eps},       {"delta", delta},
            {"leg_symbols", {leg_a, leg_b}},
            {"P", P()},           {"Q", Q()},         {"x_P", xP()},
            {"x_Q", xQ()},        {"rho_min", rho_min()}, {"tau", tau()},
            {"nu", nu()},         {"lambda_bh", lambda_bh()},
            {"domain", {domain().lo, domain().hi}}};
}

UStrip::UStrip(Arc central, Word history) : central_(central), history_(std::move(history)) {
    if (!(central_.width() > 0.0)) throw Error("strip width must be positive");
}

bool in_between(const BlenderSpec& b, const UStrip& s) {
    return s.central().lo > b.P() && s.central().hi < b.Q();
}

bool c_complete(const BlenderSpec& b, const UStrip& s) {
    return s.central().lo <= b.P() && s.central().hi >= b.Q();
}

Arc leg_image(const BlenderSpec& b, const Arc& a, Leg leg) {
    return {b.law(leg, a.lo), b.law(leg, a.hi)};
}

namespace {

Word extend(const Word& w, Symbol s) { return w.concat(Word({s}, w.alphabet())); }

UStrip clipped(const Arc& image, const Arc& window, const Word& history) {
    const double lo = std::max(image.lo, window.lo);
    const double hi = std::min(image.hi, window.hi);
    if (!(hi > lo)) throw Error("strip escaped");
    return UStrip(Arc{lo, hi}, history);
}

}  // namespace

UStrip apply_leg(const BlenderSpec& b, const UStrip& s, Leg leg) {
    return clipped(leg_image(b, s.central(), leg), b.domain(), extend(s.history(), b.symbol(leg)));
}

StripClass classify(const BlenderSpec& b, const UStrip& s) {
    const Arc& c = s.central();
    if (c.lo <= b.xP() && c.hi >= b.xQ()) return StripClass::SpansBoth;
    if (c.hi < b.xQ()) return StripClass::LeftOfXQ;
    return StripClass::RightOfXP;
}

std::string to_string(StripClass c) {
    switch (c) {
        case StripClass::LeftOfXQ: return "LeftOfXQ";
        case StripClass::RightOfXP: return "RightOfXP";
        case StripClass::SpansBoth: return "SpansBoth";
    }
    return "?";
}

std::size_t ell_bound(const BlenderSpec& b, double w, double C) {
    const double v = std::ceil(std::abs(std::log(w)) / std::log(b.lambda_bh()) + C) + 1.0;
    return v > 0.0 ? static_cast<std::size_t>(v) : 0;
}

CoveringReport cover(const BlenderSpec& b, const UStrip& s, double C) {
    const double w0 = s.width();
    const std::size_t bound = ell_bound(b, w0, C);
    const std::size_t budget = 10 * std::max<std::size_t>(bound, 1);
    auto residual = [&](std::size_t ell) {
        return static_cast<double>(ell) - 1.0 - std::abs(std::log(w0)) / std::log(b.lambda_bh());
    };

    if (c_complete(b, s)) {
        CoveringReport r{Word({}, b.alphabet), s, s.central(), w0, 0, bound, residual(0)};
        return r;
    }
    if (!in_between(b, s)) throw Error("strip is neither in-between nor c-complete");

    // Composite affine map x -> scale*x + shift from the input strip.
    double scale = 1.0;
    double shift = 0.0;
    UStrip cur(s.central(), Word({}, b.alphabet));
    std::size_t steps = 0;
    auto step = [&](Leg leg, const Arc& window) {
        if (++steps > budget) throw Error("covering failed");
        cur = clipped(leg_image(b, cur.central(), leg), window, extend(cur.history(), b.symbol(leg)));
        scale *= b.lambda;
        shift = b.lambda * shift - (leg == Leg::B ? b.eps : 0.0);
    };

    const Arc domain = b.domain();
    while (classify(b, cur) != StripClass::SpansBoth)
        step(classify(b, cur) == StripClass::LeftOfXQ ? Leg::A : Leg::B, domain);
    const Arc right{b.P(), b.Q() + b.delta};
    step(Leg::B, right);
    while (cur.central().hi < b.Q()) step(Leg::A, right);

    const Arc src{(cur.central().lo - shift) / scale, (cur.central().hi - shift) / scale};
    return CoveringReport{cur.history(), cur, src, w0, steps, bound, residual(steps)};
}

UStrip centered_strip(const BlenderSpec& b, double w) {
    const double c = 0.5 * b.Q();
    return UStrip(c - 0.5 * w, c + 0.5 * w, b.alphabet);
}

Arc replay_legs(const BlenderSpec& b, const Arc& source, const Word& steps) {
    Arc cur = source;
    const Arc domain = b.domain();
    // Rounding in the source endpoints and the composed shift grows by
    // lambda per leg.
    double growth = 1.0, slack = 0.0;
    for (Symbol s : steps.symbols()) {
        if (s != b.leg_a && s != b.leg_b) throw Error("not a leg symbol");
        cur = leg_image(b, cur, s == b.leg_a ? Leg::A : Leg::B);
        growth *= b.lambda;
        slack += 4.0 * std::numeric_limits<double>::epsilon() * growth;
        if (cur.lo < domain.lo - slack || cur.hi > domain.hi + slack) throw Error("strip escaped");
    }
    return cur;
}

double fit_C(const BlenderSpec& b, std::span<const double> widths) {
    if (widths.empty()) throw Error("no samples");
    double c = -std::numeric_limits<double>::infinity();
    for (double w : widths) c = std::max(c, cover(b, centered_strip(b, w)).C_fitted);
    return c;
}

double log_law_slope(std::span<const double> widths, std::span<const std::size_t> ells) {
    if (widths.size() != ells.size() || widths.size() < 2) throw Error("no samples");
    const double n = static_cast<double>(widths.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const double x = std::abs(std::log(widths[i]));
        const double y = static_cast<double>(ells[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

nlohmann::json CoveringReport::to_json() const {
    return {{"steps", steps.str()},
            {"w0", w0},
            {"ell_measured", ell_measured},
            {"ell_bound", ell_bound},
            {"C_fitted", C_fitted},
            {"final", {final.central().lo, final.central().hi}}};
}

std::string to_csv_row(const CoveringReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g,%zu,%zu,%.17g\n", r.w0, r.ell_measured, r.ell_bound, r.C_fitted);
    return buf;
}

}  // namespace blendlab
