#pragma once

// Finite words over {0,...,k-1}, Bernoulli measures on the base full shift,
// and exhaustive word enumeration.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace blendlab {

using Symbol = std::uint8_t;

class Word {
public:
    Word() = default;
    Word(std::vector<Symbol> symbols, unsigned alphabet);

    // Parses an ASCII digit string such as "0102".
    static Word parse(std::string_view digits, unsigned alphabet);

    unsigned alphabet() const { return alphabet_; }
    std::size_t length() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }
    std::span<const Symbol> symbols() const { return symbols_; }

    Word concat(const Word& other) const;
    Word prefix(std::size_t n) const;
    std::string str() const;

    auto operator<=>(const Word& other) const = default;

private:
    std::vector<Symbol> symbols_;
    unsigned alphabet_ = 2;
};

// Empirical symbol frequencies, one entry per alphabet letter.
std::vector<double> word_frequency(const Word& w);

class BernoulliModel {
public:
    BernoulliModel(std::vector<double> weights, std::vector<double> log_slopes);

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& log_slopes() const { return log_slopes_; }
    unsigned alphabet() const { return static_cast<unsigned>(weights_.size()); }

    // Symbols with positive weight, ascending.
    std::vector<Symbol> support() const;

    double entropy() const;
    double exponent() const;

    nlohmann::json to_json() const;
    static BernoulliModel from_json(const nlohmann::json& j);

private:
    std::vector<double> weights_;
    std::vector<double> log_slopes_;
};

double bernoulli_entropy(const BernoulliModel& m);
double entropy_of(std::span<const double> p);

inline constexpr std::size_t kDefaultEnumerationCap = 24;

// Predicate over a complete word. A prefix filter, when given, lets the
// enumerator abandon a subtree as soon as a prefix is rejected; it must
// never reject a prefix of an accepted word.
struct WordFilter {
    std::function<bool(std::span<const Symbol>)> accept;
    std::function<bool(std::span<const Symbol>)> prefix_ok;
};

// All words of the given length over `letters` accepted by the filter,
// sorted lexicographically. `letters` defaults to the full alphabet.
std::vector<Word> enumerate_words(std::size_t length, unsigned alphabet, const WordFilter& filter,
                                  std::span<const Symbol> letters = {},
                                  std::size_t cap = kDefaultEnumerationCap, unsigned jobs = 1);

}  // namespace blendlab
