#include <cmath>

#include "blendlab/error.hpp"
#include "blendlab/model.hpp"
#include "doctest.h"

using namespace blendlab;

TEST_CASE("default testbed geometry") {
    const auto sys = default_testbed();
    CHECK(sys.k() == 4);
    CHECK(sys.blender().Q() == doctest::Approx(0.5));
    CHECK(sys.blender().domain().lo == doctest::Approx(-0.05));
    CHECK(sys.blender().domain().hi == doctest::Approx(0.55));
    CHECK(sys.min_slope() <= 1.0);
    CHECK(sys.max_slope() >= 1.0);
    CHECK(sys.min_slope() > 0.0);
    for (Symbol s = 0; s < 4; ++s) CHECK(sys.map(s).is_homeomorphism());
    CHECK(sys.fixes_anchor(0));
    CHECK(sys.fixes_anchor(2));
    CHECK_FALSE(sys.fixes_anchor(3));
}

TEST_CASE("leg maps follow the affine laws on the blender domain") {
    const auto sys = default_testbed();
    const Arc d = sys.blender().domain();
    for (int i = 0; i <= 1000; ++i) {
        const double x = d.lo + d.width() * i / 1000.0;
        const double a = sys.map(0).lift(x) - 1.5 * x;
        const double b = sys.map(1).lift(x) - (1.5 * x - 0.25);
        CHECK(std::abs(a - std::round(a)) <= 1e-14);
        CHECK(std::abs(b - std::round(b)) <= 1e-14);
    }
}

TEST_CASE("anchor slopes give the reciprocal-pair exponent") {
    const auto sys = default_testbed();
    const auto logs = sys.anchor_log_slopes();
    CHECK(logs[0] == doctest::Approx(std::log(1.5)));
    CHECK(logs[2] == doctest::Approx(-std::log(1.5)));
    CHECK(sys.bernoulli({0.5, 0.0, 0.5, 0.0}).exponent() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(sys.bernoulli({0.4, 0.0, 0.6, 0.0}).exponent() == doctest::Approx(-0.2 * std::log(1.5)));
    // The rotation is an isometry.
    for (double x : {0.0, 0.3, 0.9}) CHECK(sys.map(3).derivative(x) == 1.0);
    CHECK_THROWS_AS(sys.bernoulli({0.5, 0.5}), Error);
}

TEST_CASE("testbed parameter validation") {
    TestbedParams p;
    p.eps = 0.6;  // Q = 1.2
    CHECK_THROWS_WITH_AS(default_testbed(p), "blender domain longer than the circle", Error);
    p = {};
    p.beta = 1.2;
    CHECK_THROWS_AS(default_testbed(p), Error);
    p = {};
    p.charged_half_width = 0.7;
    CHECK_THROWS_WITH_AS(default_testbed(p), "bad charged zone", Error);
}

TEST_CASE("connecting time on the default target") {
    const auto sys = default_testbed();
    const Arc T = default_target(sys.blender());
    CHECK(T.lo == doctest::Approx(1.0 / 6.0));
    CHECK(T.hi == doctest::Approx(1.0 / 3.0));
    const auto r = connecting_time(sys, T, 0.05);
    // Regression constant from the breadth-first oracle.
    CHECK(r.t_con == 3);
    CHECK(r.t_con == std::max(r.t_forward, r.t_backward));
    CHECK(r.t_con <= 64);
    CHECK(r.refinement.size() >= 2);
    CHECK(r.refinement.back().second == r.refinement[r.refinement.size() - 2].second);

    const std::size_t cells = std::size_t{1} << r.grid_bits;
    REQUIRE(r.forward.size() == cells);
    REQUIRE(r.backward.size() == cells);
    std::size_t empty = 0;
    for (std::size_t c = 0; c < cells; ++c) {
        const Arc ball = r.ball(c);
        CHECK(ball.width() == doctest::Approx(0.025));
        CHECK(r.forward[c].length() <= r.t_con);
        CHECK(r.backward[c].length() <= r.t_con);
        CHECK(T.contains(sys.image(r.forward[c], ball)));
        CHECK(sys.image(r.backward[c], T).contains(ball));
        if (T.contains(ball)) {
            CHECK(r.forward[c].empty());
            ++empty;
        }
    }
    CHECK(empty > 0);
}

TEST_CASE("connecting time is monotone in the ball radius and the target size") {
    const auto sys = default_testbed();
    const Arc T = default_target(sys.blender());
    const std::size_t t = connecting_time(sys, T, 0.05).t_con;
    // Smaller balls fit wherever larger ones do.
    CHECK(connecting_time(sys, T, 0.025).t_con <= t);
    CHECK(connecting_time(sys, T, 0.025).t_con == t);

    const Arc wide{0.1, 0.4}, mid = T, narrow{0.2, 0.3};
    const auto tw = connecting_time(sys, wide, 0.05).t_con;
    const auto tm = connecting_time(sys, mid, 0.05).t_con;
    const auto tn = connecting_time(sys, narrow, 0.05).t_con;
    CHECK(tw <= tm);
    CHECK(tm <= tn);
}

TEST_CASE("connecting time rejects bad targets and tiny horizons") {
    const auto sys = default_testbed();
    CHECK_THROWS_WITH_AS(connecting_time(sys, Arc{0.4, 0.6}, 0.05),
                         "target must lie strictly inside the in-between region", Error);
    CHECK_THROWS_AS(connecting_time(sys, default_target(sys.blender()), 0.0), Error);
    AccessOptions opt;
    opt.horizon = 1;
    CHECK_THROWS_WITH_AS(connecting_time(sys, default_target(sys.blender()), 0.05, opt),
                         "system not accessible at this resolution", Error);
}

TEST_CASE("connecting words land where they claim") {
    const auto sys = default_testbed();
    const Arc T = default_target(sys.blender());
    for (double x : {0.0, 0.37, 0.61, 0.9}) {
        const Arc q{x, x + 0.01};
        const Word f = connecting_word(sys, q, T, Direction::Forward);
        CHECK(T.contains(sys.image(f, q)));
        const Word b = connecting_word(sys, q, T, Direction::Backward);
        CHECK(sys.image(b, T).contains(q));
        // Allowing longer words never picks a more expanding one.
        const Word f3 = connecting_word(sys, q, T, Direction::Forward, 64, 1u << 20, 3);
        CHECK(T.contains(sys.image(f3, q)));
        CHECK(sys.image(f3, q).width() <= sys.image(f, q).width() + 1e-15);
    }
    CHECK_THROWS_AS(connecting_word(sys, Arc{0.7, 0.71}, T, Direction::Forward, 0), Error);
}
