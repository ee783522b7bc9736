#include <cmath>
#include <random>

#include "blendlab/error.hpp"
#include "blendlab/symbolic.hpp"
#include "doctest.h"

using namespace blendlab;

namespace {

WordFilter always() { return {[](std::span<const Symbol>) { return true; }, {}}; }

std::vector<std::string> strs(const std::vector<Word>& ws) {
    std::vector<std::string> out;
    for (const auto& w : ws) out.push_back(w.str());
    return out;
}

}  // namespace

TEST_CASE("word parsing and printing round-trip") {
    const Word w = Word::parse("0102", 3);
    CHECK(w.length() == 4);
    CHECK(w[1] == 1);
    CHECK(w.str() == "0102");
    CHECK(w.concat(Word::parse("21", 3)).str() == "010221");
    CHECK(w.prefix(2).str() == "01");
    CHECK_THROWS_WITH_AS(Word::parse("013", 3), "symbol out of alphabet", Error);
    CHECK_THROWS_WITH_AS(Word::parse("0a", 3), "word must be an ASCII digit string", Error);
    CHECK_THROWS_AS(w.concat(Word::parse("0", 2)), Error);
}

TEST_CASE("word frequencies") {
    auto f = word_frequency(Word::parse("0011", 2));
    CHECK(f[0] == 0.5);
    CHECK(f[1] == 0.5);
    f = word_frequency(Word::parse("000", 2));
    CHECK(f[0] == 1.0);
    CHECK(f[1] == 0.0);
    f = word_frequency(Word::parse("010011", 2));
    CHECK(f[0] == 0.5);
    CHECK_THROWS_WITH_AS(word_frequency(Word({}, 2)), "empty word", Error);
}

TEST_CASE("frequency of a concatenation is the length-weighted average") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> len(1, 30), sym(0, 3);
    for (int t = 0; t < 100; ++t) {
        std::vector<Symbol> a(len(rng)), b(len(rng));
        for (auto& s : a) s = static_cast<Symbol>(sym(rng));
        for (auto& s : b) s = static_cast<Symbol>(sym(rng));
        const Word wa(a, 4), wb(b, 4);
        const auto fa = word_frequency(wa), fb = word_frequency(wb), fab = word_frequency(wa.concat(wb));
        const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
        for (int i = 0; i < 4; ++i) CHECK(fab[i] == doctest::Approx((na * fa[i] + nb * fb[i]) / (na + nb)).epsilon(1e-14));
    }
}

TEST_CASE("bernoulli entropy values") {
    CHECK(BernoulliModel({0.5, 0.5}, {0, 0}).entropy() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(BernoulliModel({1.0, 0.0}, {0, 0}).entropy() == 0.0);
    // -(1/4) log(1/4) - (3/4) log(3/4)
    const double oracle = 0.25 * std::log(4.0) + 0.75 * std::log(4.0 / 3.0);
    const double h = bernoulli_entropy(BernoulliModel({0.25, 0.75}, {0, 0}));
    CHECK(h == doctest::Approx(oracle).epsilon(1e-15));
    CHECK(h == doctest::Approx(0.562335).epsilon(1e-6));
}

TEST_CASE("bernoulli entropy is maximal at uniform weights") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const int k = 2 + t % 2;
        std::vector<double> p(k);
        double total = 0;
        for (auto& x : p) total += (x = u(rng));
        for (auto& x : p) x /= total;
        CHECK(entropy_of(p) <= std::log(static_cast<double>(k)) + 1e-12);
    }
}

TEST_CASE("bernoulli exponent and validation") {
    const BernoulliModel mu({0.4, 0.6}, {std::log(1.5), -std::log(1.5)});
    CHECK(mu.exponent() == doctest::Approx(-0.2 * std::log(1.5)).epsilon(1e-14));
    CHECK(mu.support() == std::vector<Symbol>{0, 1});
    CHECK(BernoulliModel({0.0, 1.0}, {1, 2}).support() == std::vector<Symbol>{1});
    CHECK_THROWS_WITH_AS(BernoulliModel({0.5, 0.6}, {0, 0}), "weights must sum to 1", Error);
    CHECK_THROWS_AS(BernoulliModel({-0.5, 1.5}, {0, 0}), Error);
    const auto back = BernoulliModel::from_json(mu.to_json());
    CHECK(back.weights() == mu.weights());
    CHECK(back.log_slopes() == mu.log_slopes());
}

TEST_CASE("enumerate_words examples") {
    CHECK(strs(enumerate_words(2, 2, always())) == std::vector<std::string>{"00", "01", "10", "11"});
    WordFilter two_thirds{[](std::span<const Symbol> w) {
                              int zeros = 0;
                              for (Symbol s : w) zeros += s == 0;
                              return 3 * zeros == 2 * static_cast<int>(w.size());
                          },
                          {}};
    CHECK(strs(enumerate_words(3, 2, two_thirds)) == std::vector<std::string>{"001", "010", "100"});
    WordFilter never{[](std::span<const Symbol>) { return false; }, {}};
    CHECK(enumerate_words(1, 2, never).empty());
    CHECK_THROWS_WITH_AS(enumerate_words(25, 2, always()), "enumeration too large", Error);
}

TEST_CASE("full enumeration has k^n words") {
    for (unsigned k = 2; k <= 3; ++k)
        for (std::size_t n = 0; n <= 12; ++n)
            CHECK(enumerate_words(n, k, always()).size() == static_cast<std::size_t>(std::pow(k, n)));
}

TEST_CASE("prefix pruning and threads do not change the result") {
    // Words with no two consecutive 1s: a prefix-closed language.
    auto no11 = [](std::span<const Symbol> w) {
        for (std::size_t i = 1; i < w.size(); ++i)
            if (w[i] == 1 && w[i - 1] == 1) return false;
        return true;
    };
    const auto plain = enumerate_words(14, 2, WordFilter{no11, {}});
    const auto pruned = enumerate_words(14, 2, WordFilter{no11, no11}, {}, kDefaultEnumerationCap, 3);
    CHECK(plain == pruned);
    CHECK(plain.size() == 987);  // Fibonacci F(16)
    const std::vector<Symbol> letters{0, 2};
    const auto sub = enumerate_words(4, 3, always(), letters);
    CHECK(sub.size() == 16);
    CHECK(sub.front().str() == "0000");
    CHECK(sub.back().str() == "2222");
}
