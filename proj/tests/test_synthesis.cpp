#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "blendlab/error.hpp"
#include "blendlab/synthesis.hpp"
#include "doctest.h"

using namespace blendlab;

namespace {

struct Run {
    SkewProductSystem sys;
    BernoulliModel mu;
    AccessibilityReport access;
    Skeleton sk;
    HorseshoeSpec hs;
};

Run make_run(const std::vector<double>& weights, const SkeletonParams& p, const ModeSpec& mode) {
    auto sys = default_testbed();
    auto mu = sys.bernoulli(weights);
    auto access = connecting_time(sys, default_target(sys.blender()), 0.05);
    auto sk = extract(sys, mu, p);
    auto hs = synthesize(sys, sk, access, mode);
    return {std::move(sys), std::move(mu), std::move(access), std::move(sk), std::move(hs)};
}

SkeletonParams params(std::size_t m, double eps_E, double K0, double eps_B) {
    SkeletonParams p;
    p.m = m;
    p.eps_E = eps_E;
    p.K0 = K0;
    p.eps_B = eps_B;
    return p;
}

const Run& mode_a() {
    static const Run r = make_run({0.5, 0.0, 0.5, 0.0}, params(20, 0.005, 4.0, 0.15), ModeSpec{});
    return r;
}

const Run& mode_a_small() {
    static const Run r = make_run({0.5, 0.0, 0.5, 0.0}, params(12, 0.01, 3.0, 0.15), ModeSpec{});
    return r;
}

const Run& mode_b(std::size_t m) {
    static std::map<std::size_t, Run> cache;
    auto it = cache.find(m);
    if (it == cache.end())
        it = cache.emplace(m, make_run({0.4, 0.0, 0.6, 0.0}, params(m, 0.01, 3.0, 0.14), ModeSpec{Mode::B, 0.1, 0.05}))
                 .first;
    return it->second;
}

double circle_dist(double x, double y) {
    const double d = std::abs(x - y) - std::floor(std::abs(x - y));
    return std::min(d, 1.0 - d);
}

}  // namespace

TEST_CASE("cycle words are distinct, of common length and built from their parts") {
    for (const Run* r : {&mode_a(), &mode_b(20)}) {
        const auto& hs = r->hs;
        CHECK(hs.N == 2 * hs.t_con + hs.m + hs.ell);
        CHECK(hs.t_con >= r->access.t_con);
        std::set<std::string> seen;
        for (std::size_t i = 0; i < hs.card(); ++i) {
            const auto& c = hs.components[i];
            CHECK(hs.cycle_words[i].length() == hs.N);
            CHECK(c.in.length() == hs.t_con);
            CHECK(c.out.length() == hs.t_con);
            CHECK(c.blender.length() == hs.ell);
            CHECK(c.skeleton == r->sk.words[i]);
            CHECK(hs.cycle_words[i] == c.in.concat(c.skeleton).concat(c.out).concat(c.blender));
            seen.insert(hs.cycle_words[i].str());
        }
        CHECK(seen.size() == hs.card());
        CHECK(hs.card() == r->sk.card());
    }
}

TEST_CASE("rectangles sit inside the target and the anchor interval has the prescribed width") {
    const auto& r = mode_a();
    const auto& hs = r.hs;
    CHECK(hs.delta_c == doctest::Approx(std::exp(-20.0 * std::sqrt(r.sk.params.eps1()))));
    CHECK(hs.anchor_interval.width() == doctest::Approx(hs.delta_c));
    const auto& b = mode_b(20).hs;
    CHECK(b.delta_c == doctest::Approx(std::exp(-20.0 * 0.1)));
    for (std::size_t i = 0; i < hs.card(); ++i) {
        CHECK(hs.target.contains(hs.rectangles[i]));
        CHECK(hs.rectangles[i].width() > 0.0);
        CHECK(hs.rectangles[i].contains(hs.periodic_points[i]));
    }
}

TEST_CASE("blender segment: the cover of the skeleton image is c-complete and padding keeps it so") {
    const auto& r = mode_a();
    const auto& hs = r.hs;
    const auto& sys = r.sys;
    const auto& b = sys.blender();
    for (std::size_t i = 0; i < hs.card(); i += 997) {
        const auto& c = hs.components[i];
        const Arc Im = sys.image(c.skeleton, hs.anchor_interval);
        Arc S = sys.image(c.out, Im);
        S = {S.lo - std::floor(S.lo - hs.target.lo), S.hi - std::floor(S.lo - hs.target.lo)};
        CHECK(hs.target.contains(S));
        const auto cov = cover(b, UStrip(S, Word({}, sys.k())));
        CHECK(cov.ell_measured == hs.cover_lengths[i]);
        CHECK(c_complete(b, cov.final));
        const auto bs = c.blender.symbols();
        CHECK(std::equal(cov.steps.symbols().begin(), cov.steps.symbols().end(), bs.begin()));
        UStrip u = cov.final;
        for (std::size_t p = cov.ell_measured; p < hs.ell; ++p) {
            CHECK(bs[p] == b.leg_a);
            u = apply_leg(b, u, Leg::A);
            CHECK(c_complete(b, u));
        }
    }
}

TEST_CASE("random concatenations replay legally") {
    for (const Run* r : {&mode_a(), &mode_b(20)}) {
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<std::size_t> pick(0, r->hs.card() - 1), len(1, 5);
        for (int t = 0; t < 300; ++t) {
            std::vector<std::size_t> idx(len(rng));
            for (auto& i : idx) i = pick(rng);
            CHECK(replay_concatenation(r->sys, r->hs, idx));
        }
        CHECK_FALSE(replay_concatenation(r->sys, r->hs, {}));
    }
}

TEST_CASE("block entropy: explicit count equals log card / N") {
    const auto& hs = mode_a_small().hs;
    REQUIRE(static_cast<double>(hs.card()) * hs.card() <= static_cast<double>(kExplicitBlockLimit));
    const auto be = block_count_entropy(hs, 2);
    CHECK(be.explicit_count);
    CHECK(be.value == doctest::Approx(std::log(static_cast<double>(hs.card())) / hs.N).epsilon(1e-12));
    CHECK(hs.entropy_estimate == doctest::Approx(be.value).epsilon(1e-12));
    const auto pr = block_count_entropy(mode_a().hs, 3);
    CHECK_FALSE(pr.explicit_count);
    CHECK(std::abs(pr.value - mode_a().hs.entropy_estimate) <= 0.01 * mode_a().hs.entropy_estimate);
    CHECK_THROWS_AS(block_count_entropy(hs, 0), Error);
}

TEST_CASE("periodic measures: frequencies, exponents and the floor") {
    const auto& r = mode_a();
    const auto& hs = r.hs;
    const double floor = exponent_floor(r.sys, hs, r.sk.params);
    const double oracle_floor = (-std::log(4.0) - 20.0 * r.sk.params.eps1() +
                                 2.0 * hs.t_con * std::log(r.sys.min_slope()) + hs.ell * std::log(1.5)) /
                                static_cast<double>(hs.N);
    CHECK(floor == doctest::Approx(oracle_floor).epsilon(1e-12));
    CHECK(hs.exponent_min > 0.0);
    CHECK(hs.exponent_min >= floor);
    for (std::size_t i = 0; i < hs.card(); i += 4099) {
        const auto pm = periodic_measure(r.sys, hs, i);
        CHECK(pm.word == hs.cycle_words[i]);
        CHECK(pm.frequencies == word_frequency(hs.cycle_words[i]));
        CHECK(pm.exponent == doctest::Approx(hs.exponents[i]).epsilon(1e-9));
        CHECK(pm.exponent >= floor);
        // Off the skeleton segment at most 2 t_con + ell letters differ from mu.
        const double pad = static_cast<double>(2 * hs.t_con + hs.ell) / hs.N;
        const double skel = static_cast<double>(hs.m) / hs.N;
        CHECK(std::abs(pm.frequencies[0] - 0.5) <= skel * r.sk.params.eps_B + pad);
    }
    const auto pm = periodic_measure(r.sys, hs, std::vector<std::size_t>{0, 1, 2});
    CHECK(pm.word.length() == 3 * hs.N);
    CHECK(pm.exponent > 0.0);
    CHECK_THROWS_AS(periodic_measure(r.sys, hs, hs.card()), Error);
    CHECK_THROWS_AS(periodic_measure(r.sys, hs, std::vector<std::size_t>{}), Error);
}

TEST_CASE("mode B: blender length follows m") {
    const auto& a = mode_b(17).hs;
    const auto& b = mode_b(21).hs;
    CHECK(b.ell >= a.ell);
    // delta_c shrinks by e^{-4 beta}, which the blender pays for at rate
    // log 1.5; where phase one stops adds up to log 3 / log 1.5 either way.
    const double expect = 4.0 * 0.1 / std::log(1.5);
    CHECK(std::abs(static_cast<double>(b.ell) - static_cast<double>(a.ell) - expect) <=
          std::ceil(std::log(3.0) / std::log(1.5)));
    // The blender share only falls short of the limiting fraction; see README.
    const double s = 0.1 + 0.2 * std::log(1.5);
    const double K = 1.0 / std::log(1.5);
    for (const auto* hs : {&a, &b}) {
        const double frac = static_cast<double>(hs->ell) / static_cast<double>(hs->m + hs->ell);
        CHECK(frac >= K * s / (1.0 + K * s) - 0.05);
    }
}

TEST_CASE("Birkhoff deviations per cycle word") {
    const auto& r = mode_a();
    const auto& hs = r.hs;
    const auto fam = default_family(r.sys);
    const auto target = bernoulli_integrals(r.sys, fam, r.mu);
    const double eB = r.sk.params.eps_B;
    const double pi = std::acos(-1.0);
    for (std::size_t i = 0; i < hs.card(); i += 1013) {
        const auto& w = hs.cycle_words[i];
        const auto own = orbit_integrals(r.sys, fam, w, hs.periodic_points[i]);
        for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(own[j] - target[j]) < 3.0 * eB);
        // sin and cos: near the anchor they move by at most 2 pi d, elsewhere by at most 2.
        double x = hs.periodic_points[i], maxd = 0.0;
        for (std::size_t p = 0; p < w.length(); ++p) {
            if (p >= hs.t_con && p < hs.t_con + hs.m) maxd = std::max(maxd, circle_dist(x, r.sys.anchor()));
            x = r.sys.map(w[p])(x);
        }
        const double bound = (2.0 * static_cast<double>(2 * hs.t_con + hs.ell) + hs.m * 2.0 * pi * maxd) / hs.N;
        CHECK(std::abs(own[4] - target[4]) <= bound);
        CHECK(std::abs(own[5] - target[5]) <= bound);
    }
}

TEST_CASE("verification report of the mode A run") {
    const auto& r = mode_a();
    const auto rep = verify(r.sys, r.hs, r.sk, r.mu, ModeSpec{});
    CHECK(rep.entropy_ok);
    CHECK(rep.block_ok);
    CHECK(rep.exponents_positive);
    CHECK(rep.exponent_window_ok);
    CHECK(rep.floor_ok);
    CHECK(rep.weakstar_ok);
    CHECK(rep.legality_ok);
    CHECK(rep.pass());
    CHECK(rep.D_self == 0.0);
    CHECK(rep.distances.size() == 32);
    CHECK(rep.D_max == *std::max_element(rep.distances.begin(), rep.distances.end()));
    CHECK(rep.family_version == "phi6-v1");
    CHECK(rep.legality_checked == 1000);
    const auto j = rep.to_json();
    CHECK(j["pass"] == true);
    const std::string row = to_csv_row(rep);
    CHECK(std::count(row.begin(), row.end(), ',') == 8);
    CHECK(std::string(kSummaryCsvHeader).rfind("# blendlab synthesis csv v1\n", 0) == 0);
    // Same seed, same report.
    CHECK(verify(r.sys, r.hs, r.sk, r.mu, ModeSpec{}).distances == rep.distances);
}

TEST_CASE("degenerate measure yields one periodic orbit") {
    SkeletonParams p;
    p.m = 16;
    const Run r = make_run({0.0, 0.0, 1.0, 0.0}, p, ModeSpec{Mode::B, 0.1, 0.05});
    REQUIRE(r.hs.card() == 1);
    CHECK(r.hs.entropy_estimate == 0.0);
    const double x = r.hs.periodic_points[0];
    const double y = r.sys.apply_lift(r.hs.cycle_words[0], x);
    CHECK(std::abs(y - std::round(y - x) - x) < 1e-9);
    CHECK(r.hs.exponents[0] != 0.0);
}

TEST_CASE("horseshoe serialization") {
    const auto& hs = mode_a_small().hs;
    const auto j = hs.to_json();
    CHECK(j["cycles"].size() == hs.card());
    CHECK(j["N"] == hs.N);
    CHECK_FALSE(hs.to_json(false).contains("cycles"));
}
