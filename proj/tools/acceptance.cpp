// Acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.
// Expected values are recomputed here from closed forms or by brute force,
// not read back from the library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "blendlab/blender.hpp"
#include "blendlab/fiber.hpp"
#include "blendlab/metrics.hpp"
#include "blendlab/model.hpp"
#include "blendlab/skeleton.hpp"
#include "blendlab/synthesis.hpp"

using namespace blendlab;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

Outcome blender_constants() {
    const BlenderSpec b(1.5, 0.25, 0.05);
    // x = 1.5x gives P = 0; x = 1.5x - 0.25 gives Q = 0.5. One-step
    // preimages: 1.5x - 0.25 = 0 at 1/6, 1.5x = 0.5 at 1/3.
    const double P = 0.0, Q = 0.5, xP = 1.0 / 6.0, xQ = 1.0 / 3.0;
    const bool ok = near(b.P(), P) && near(b.Q(), Q) && near(b.xP(), xP) && near(b.xQ(), xQ) &&
                    near(b.rho_min(), xQ - xP) && near(b.tau(), xQ - P) && near(b.nu(), Q - P) &&
                    near(b.domain().lo, -0.05) && near(b.domain().hi, 0.55);
    return {ok, fmt("Q=%.15g xP=%.15g xQ=%.15g domain=[%.15g, %.15g]", b.Q(), b.xP(), b.xQ(), b.domain().lo,
                    b.domain().hi)};
}

Outcome covering_law() {
    const BlenderSpec b(1.5, 0.25, 0.05);
    std::vector<double> widths;
    for (int e = 1; e <= 8; ++e) widths.push_back(std::pow(10.0, -e));
    std::vector<std::size_t> ells;
    for (double w : widths) ells.push_back(cover(b, centered_strip(b, w)).ell_measured);

    // OLS slope of ell on |log w|, by hand.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(widths.size());
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const double x = std::abs(std::log(widths[i]));
        const double y = static_cast<double>(ells[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double target = 1.0 / std::log(1.5);

    const double C = fit_C(b, widths);
    bool certified = true;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const double bound = std::ceil(std::abs(std::log(widths[i])) / std::log(1.5) + C) + 1.0;
        certified = certified && static_cast<double>(ells[i]) <= bound;
    }
    const bool ok = std::abs(slope - target) <= 0.05 * target && certified;
    return {ok, fmt("slope %.4f vs %.4f, C=%.4f certifies all 8 widths: %s", slope, target, C,
                    certified ? "yes" : "no")};
}

Outcome skeleton_cardinality() {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.5, 0.0, 0.5, 0.0});
    SkeletonParams p;
    p.m = 16;
    p.eps_B = 0.14;
    p.eps_E = 0.15;
    p.K0 = 2.0;
    p.L0 = 2.0;
    p.eps_H = 0.15;
    const Skeleton sk = extract(sys, mu, p);

    // Brute force over all 2^16 words in {0, 2}: slopes 1.5 and 1/1.5 at the
    // anchor, alpha = 0, both frequency means 1/2, domain indicator constant.
    std::size_t count = 0;
    const double ls = std::log(1.5);
    for (unsigned bits = 0; bits < (1u << 16); ++bits) {
        bool ok = true;
        int zeros = 0;
        for (int l = 1; l <= 16 && ok; ++l) {
            zeros += ((bits >> (16 - l)) & 1u) ? 0 : 1;
            const int twos = l - zeros;
            ok = std::abs((zeros - twos) * ls) <= std::log(2.0) + 0.15 * l &&
                 std::abs(zeros - 0.5 * l) <= 2.0 + 0.14 * l;
        }
        ok = ok && std::abs(zeros / 16.0 - 0.5) <= 0.14;
        count += ok;
    }
    const double bound = std::ceil(0.5 * std::exp(16.0 * (std::log(2.0) - 0.15)));
    const bool ok = static_cast<double>(sk.card()) >= bound && sk.card() == count;
    return {ok, fmt("card %zu, brute force %zu, bound %.0f", sk.card(), count, bound)};
}

struct Campaign {
    SkewProductSystem sys;
    BernoulliModel mu;
    Skeleton sk;
    HorseshoeSpec hs;
    VerificationReport r;
};

Campaign run_campaign(const std::vector<double>& weights, const SkeletonParams& p, const ModeSpec& mode) {
    auto sys = default_testbed();
    auto mu = sys.bernoulli(weights);
    const auto access = connecting_time(sys, default_target(sys.blender()), 0.05);
    auto sk = extract(sys, mu, p);
    auto hs = synthesize(sys, sk, access, mode);
    auto r = verify(sys, hs, sk, mu, mode);
    return {std::move(sys), std::move(mu), std::move(sk), std::move(hs), std::move(r)};
}

SkeletonParams mode_a_params(std::size_t m, double eps_E, double K0) {
    SkeletonParams p;
    p.m = m;
    p.eps_E = eps_E;
    p.K0 = K0;
    p.eps_B = 0.15;
    return p;
}

Outcome entropy_sandwich() {
    bool ok = true;
    std::string detail;
    for (std::size_t m : {12, 16, 20}) {
        const auto c = run_campaign({0.5, 0.0, 0.5, 0.0}, mode_a_params(m, 0.01, 3.0), ModeSpec{});
        const double N = static_cast<double>(c.hs.N);
        const double h = std::log(2.0);
        const double eH = c.sk.params.eps_H, lL = std::abs(std::log(c.sk.params.L0));
        const double est = std::log(static_cast<double>(c.sk.card())) / N;
        const double lo = (m * (h - eH) - lL) / N, hi = (m * (h + eH) + lL) / N;
        const double block = block_count_entropy(c.hs, 3).value;
        const bool here = lo <= est && est <= hi && std::abs(block - est) <= 0.01 * est;
        ok = ok && here;
        detail += fmt("m=%zu %.4f<=%.4f<=%.4f block %.4f; ", m, lo, est, hi, block);
    }
    return {ok, detail};
}

const Campaign& mode_a() {
    static const Campaign c = run_campaign({0.5, 0.0, 0.5, 0.0}, mode_a_params(20, 0.005, 4.0), ModeSpec{});
    return c;
}

Outcome central_expansion() {
    const Campaign& c = mode_a();
    const auto& hs = c.hs;
    const auto& p = c.sk.params;
    const double floor = (-std::log(p.K0) - hs.m * p.eps1() + 2.0 * hs.t_con * std::log(c.sys.min_slope()) +
                          hs.ell * std::log(1.5)) /
                         static_cast<double>(hs.N);
    bool inside = true;
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < hs.card(); ++i) {
        // Recompute each exponent from a fresh cocycle at the periodic point.
        const double chi = cocycle(c.sys.maps(), hs.cycle_words[i], hs.periodic_points[i]).final_log() /
                           static_cast<double>(hs.N);
        inside = inside && chi > 0.0 && chi < 0.1;
        lo = std::min(lo, chi);
        hi = std::max(hi, chi);
    }
    const bool ok = inside && lo > floor;
    return {ok, fmt("%zu cycle words, exponents in [%.4f, %.4f], floor %.4f", hs.card(), lo, hi, floor)};
}

Outcome weakstar() {
    const Campaign& c = mode_a();
    const auto fam = default_family(c.sys);
    const Integrals I = bernoulli_integrals(c.sys, fam, c.mu);
    const double self = weakstar_distance(I, I, fam).value;
    const double bound = 4.0 * c.sk.params.eps_B;
    const bool ok = !c.r.distances.empty() && c.r.D_max < bound && self == 0.0;
    return {ok, fmt("%zu periodic measures, max D %.4f < %.2f, D(mu,mu)=%g", c.r.distances.size(), c.r.D_max,
                    bound, self)};
}

Outcome mode_b_windows() {
    SkeletonParams p;
    p.m = 20;
    p.eps_E = 0.01;
    p.K0 = 3.0;
    const ModeSpec mode{Mode::B, 0.1, 0.05};
    const auto c = run_campaign({0.4, 0.0, 0.6, 0.0}, p, mode);
    const double alpha = -0.2 * std::log(1.5);
    const double s = 0.1 + std::abs(alpha);
    const double K = 1.0 / std::log(1.5);
    const double lo = 0.1 / (1.0 + K * s) - 0.05;
    const double hi = 0.1 / (1.0 + s / std::log(c.sys.max_slope())) + 0.05;
    const double dbound = K * s / (1.0 + K * s) + 0.05;
    bool inside = std::abs(c.mu.exponent() - alpha) < 1e-12;
    for (double chi : c.hs.exponents) inside = inside && lo <= chi && chi <= hi;
    const bool ok = inside && c.r.D_max <= dbound;
    return {ok, fmt("exponents [%.4f, %.4f] in [%.4f, %.4f], max D %.4f <= %.4f", c.hs.exponent_min,
                    c.hs.exponent_max, lo, hi, c.r.D_max, dbound)};
}

Outcome degenerate() {
    SkeletonParams p;
    p.m = 16;
    const auto c = run_campaign({0.0, 0.0, 1.0, 0.0}, p, ModeSpec{Mode::B, 0.1, 0.05});
    if (c.hs.card() != 1) return {false, fmt("card %zu", c.hs.card())};
    const Word& w = c.hs.cycle_words[0];
    const double x = c.hs.periodic_points[0];
    const double y = c.sys.apply_lift(w, x);
    const double gap = std::abs(y - std::round(y - x) - x);
    const double chi = cocycle(c.sys.maps(), w, x).final_log() / static_cast<double>(w.length());
    const bool ok = c.hs.entropy_estimate == 0.0 && gap < 1e-9 && chi != 0.0 &&
                    replay_concatenation(c.sys, c.hs, {0, 0, 0}) && c.r.pass();
    return {ok, fmt("entropy %g, period %zu, return gap %.2e, exponent %.4f", c.hs.entropy_estimate, w.length(),
                    gap, chi)};
}

Outcome distortion() {
    const auto sys = default_testbed();
    bool affine_zero = true;
    for (Symbol s = 0; s < sys.k(); ++s) {
        const auto rep = distortion_meter(sys.map(s), Arc{0.0, 1e-4}, 10);
        for (std::size_t l = 0; l <= 10; ++l) affine_zero = affine_zero && rep.max_log_dist[l] == 0.0 && !rep.flagged[l];
    }
    const SineModulatedMap f(1.5, 0.01);
    const double delta0 = 0.05;
    const double epsD = modulus_of_continuity(f, 2.0 * delta0);
    const double r = distortion_radius(delta0, 1.0, std::log(1.51), epsD, 10);
    bool bounded = true;
    double worst = 0.0;
    for (int c = 0; c < 16; ++c) {
        const double x = c / 16.0;
        const auto rep = distortion_meter(f, Arc{x - r, x + r}, 10);
        for (std::size_t l = 0; l <= 10; ++l) {
            bounded = bounded && rep.max_log_dist[l] <= static_cast<double>(l) * epsD;
            if (l) worst = std::max(worst, rep.max_log_dist[l] / (static_cast<double>(l) * epsD));
        }
    }
    return {affine_zero && bounded,
            fmt("affine zero: %s, eps_D=%.5f r=%.3e, worst ratio %.3f", affine_zero ? "yes" : "no", epsD, r, worst)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "blender constants", 1.0, blender_constants},
        {2, "covering log-law", 1.0, covering_law},
        {3, "skeleton cardinality", 10.0, skeleton_cardinality},
        {4, "entropy sandwich", 120.0, entropy_sandwich},
        {5, "central expansion, mode A", 60.0, central_expansion},
        {6, "weak* approximation, mode A", 60.0, weakstar},
        {7, "mode B windows", 120.0, mode_b_windows},
        {8, "degenerate periodic orbit", 1.0, degenerate},
        {9, "distortion", 10.0, distortion},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool ok = o.ok && in_time;
        failed += !ok;
        std::printf("criterion %d %s: %s (%.2f s of %.0f s) %s\n", c.id, ok ? "PASS" : "FAIL", c.title, secs,
                    c.budget_s, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
