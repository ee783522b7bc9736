#include <cmath>
#include <set>
#include <sstream>

#include "blendlab/error.hpp"
#include "blendlab/skeleton.hpp"
#include "doctest.h"

using namespace blendlab;

namespace {

SkeletonParams example_params(std::size_t m) {
    SkeletonParams p;
    p.m = m;
    p.eps_B = 0.14;
    p.eps_E = 0.15;
    p.K0 = 2.0;
    p.L0 = 2.0;
    p.eps_H = 0.15;
    return p;
}

// Brute force over {0, 2}^m: symbol 0 has log-slope +l, symbol 2 has -l at
// the anchor; the blender-domain indicator is identically 1 there.
std::set<std::string> oracle_words(std::size_t m, double w0, const SkeletonParams& p) {
    const double l = std::log(1.5);
    const double alpha = w0 * l - (1.0 - w0) * l;
    std::set<std::string> out;
    for (unsigned bits = 0; bits < (1u << m); ++bits) {
        std::string s;
        int zeros = 0;
        bool ok = true;
        for (std::size_t i = 1; i <= m && ok; ++i) {
            const bool two = (bits >> (m - i)) & 1u;
            s += two ? '2' : '0';
            zeros += !two;
            const double n = static_cast<double>(i);
            const double S = (2.0 * zeros - n) * l;
            ok = std::abs(S - n * alpha) <= std::log(p.K0) + n * p.eps_E &&
                 std::abs(zeros - n * w0) <= p.K0 + n * p.eps_B &&
                 std::abs((n - zeros) - n * (1.0 - w0)) <= p.K0 + n * p.eps_B;
        }
        const double f0 = zeros / static_cast<double>(m);
        ok = ok && std::abs(f0 - w0) <= p.eps_B && std::abs((1.0 - f0) - (1.0 - w0)) <= p.eps_B;
        if (ok) out.insert(s);
    }
    return out;
}

std::set<std::string> as_set(const Skeleton& sk) {
    std::set<std::string> out;
    for (const auto& w : sk.words) out.insert(w.str());
    return out;
}

}  // namespace

TEST_CASE("skeleton parameters") {
    SkeletonParams p;
    CHECK(p.eps2() == doctest::Approx(2 * p.eps_E + p.eps_D_ss + p.eps_D_uu + p.eps_D));
    CHECK(p.eps1() > p.eps2());
    p.K0 = 0.5;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.eps_B = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    const SkeletonParams q = SkeletonParams::from_json(example_params(12).to_json());
    CHECK(q.m == 12);
    CHECK(q.eps_B == 0.14);
}

TEST_CASE("zero-exponent skeleton at m = 16 matches brute force and the cardinality bound") {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.5, 0.0, 0.5, 0.0});
    const auto p = example_params(16);
    const Skeleton sk = extract(sys, mu, p);
    const auto oracle = oracle_words(16, 0.5, p);
    CHECK(as_set(sk) == oracle);
    CHECK(static_cast<double>(sk.card()) >= std::ceil(0.5 * std::exp(16.0 * (std::log(2.0) - 0.15))));
    CHECK(skeleton_card_bound(p, mu.entropy()) == doctest::Approx(0.5 * std::exp(16.0 * (std::log(2.0) - 0.15))));
    for (const auto& w : sk.words) CHECK(w.length() == 16);
    CHECK(std::is_sorted(sk.words.begin(), sk.words.end()));
}

TEST_CASE("nonzero exponent target centres the envelope at l * alpha") {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.6, 0.0, 0.4, 0.0});
    CHECK(mu.exponent() == doctest::Approx(0.2 * std::log(1.5)));
    const auto p = example_params(14);
    const Skeleton sk = extract(sys, mu, p);
    CHECK(as_set(sk) == oracle_words(14, 0.6, p));
}

TEST_CASE("single-symbol skeleton with wide tolerances") {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.5, 0.0, 0.5, 0.0});
    SkeletonParams p;
    p.m = 1;
    p.eps_B = 0.6;
    p.eps_E = 1.0;
    p.K0 = 4.0;
    p.eps_H = 1.0;
    const Skeleton sk = extract(sys, mu, p);
    CHECK(as_set(sk) == std::set<std::string>{"0", "2"});
}

TEST_CASE("extraction errors") {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.5, 0.0, 0.5, 0.0});
    auto p = example_params(16);
    p.eps_E = 0.001;
    p.K0 = 1.0;
    CHECK_THROWS_WITH_AS(extract(sys, mu, p), "skeleton too small: increase m or tolerances", Error);
    p = example_params(16);
    p.eps = 0.9;
    CHECK_THROWS_WITH_AS(extract(sys, mu, p), "separation scale exceeds the minimal piece length", Error);
    CHECK_THROWS_WITH_AS(extract(sys, sys.bernoulli({0.5, 0.0, 0.0, 0.5}), example_params(8)),
                         "measure charges a symbol that moves the anchor", Error);
}

TEST_CASE("certify round-trips and prefixes stay inside the envelope") {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.5, 0.0, 0.5, 0.0});
    const Skeleton sk = extract(sys, mu, example_params(12));
    const auto cert = certify(sys, sk);
    REQUIRE(cert.size() == sk.card());
    const double lK0 = std::log(2.0);
    for (std::size_t i = 0; i < sk.card(); ++i) {
        CHECK(cert[i].derivative_slack >= 0.0);
        CHECK(cert[i].birkhoff_slack >= 0.0);
        CHECK(cert[i].derivative_slack == doctest::Approx(sk.certificates[i].derivative_slack).epsilon(1e-12));
        // Every prefix satisfies its own-length envelope.
        const auto c = cocycle(sys.maps(), sk.words[i], sys.anchor());
        for (std::size_t l = 0; l <= 12; ++l)
            CHECK(std::abs(c.partial_logs[l]) <= lK0 + 0.15 * static_cast<double>(l) + 1e-12);
    }
    CHECK(certify(sys, Skeleton{{}, example_params(12), mu, {}}).empty());
}

TEST_CASE("certify names the word and prefix of a violation") {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.5, 0.0, 0.5, 0.0});
    const Word bad = Word::parse("0000000000000000", 4);
    // First l with l log 1.5 > log 2 + 0.15 l.
    std::size_t first = 1;
    while (static_cast<double>(first) * std::log(1.5) <= std::log(2.0) + 0.15 * static_cast<double>(first)) ++first;
    CHECK(first == 3);
    const Skeleton sk{{bad}, example_params(16), mu, {}};
    CHECK_THROWS_WITH_AS(certify(sys, sk),
                         ("derivative envelope violated by word 0000000000000000 at prefix length " +
                          std::to_string(first)).c_str(),
                         Error);
}

TEST_CASE("log card / m grows toward the entropy") {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.5, 0.0, 0.5, 0.0});
    double prev = 0.0;
    for (std::size_t m : {12, 14, 16, 18, 20}) {
        const Skeleton sk = extract(sys, mu, example_params(m));
        const double rate = std::log(static_cast<double>(sk.card())) / static_cast<double>(m);
        CHECK(rate >= prev);
        CHECK(rate <= std::log(2.0));
        prev = rate;
    }
    CHECK(prev >= std::log(2.0) - 0.15 - 0.02);
}

TEST_CASE("words are distinct and the separation scale sits below the piece length") {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.5, 0.0, 0.5, 0.0});
    const auto p = example_params(14);
    const Skeleton sk = extract(sys, mu, p);
    CHECK(as_set(sk).size() == sk.card());
    CHECK(p.eps <= sys.min_piece_length());
}

TEST_CASE("threads, least admissible m and serialization") {
    const auto sys = default_testbed();
    const auto mu = sys.bernoulli({0.5, 0.0, 0.5, 0.0});
    const auto p = example_params(14);
    CHECK(extract(sys, mu, p, 1).words == extract(sys, mu, p, 3).words);

    auto tight = example_params(1);
    tight.eps_E = 0.05;
    const std::size_t m0 = least_admissible_m(sys, mu, tight, 1, 20);
    REQUIRE(m0 > 0);
    if (m0 > 1) {
        tight.m = m0 - 1;
        CHECK_THROWS_AS(extract(sys, mu, tight), Error);
    }
    tight.m = m0;
    CHECK_NOTHROW(extract(sys, mu, tight));

    const Skeleton sk = extract(sys, mu, example_params(8));
    const auto j = sk.to_json();
    for (const char* key : {"params", "target", "words", "certificates"}) CHECK(j.contains(key));
    CHECK(j["words"].size() == sk.card());
    std::ostringstream os;
    write_words(os, sk.words);
    CHECK(os.str().substr(0, 9) == sk.words[0].str() + "\n");
}
