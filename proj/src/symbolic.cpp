#include "blendlab/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "blendlab/error.hpp"
#include "blendlab/parallel.hpp"

namespace blendlab {

Word::Word(std::vector<Symbol> symbols, unsigned alphabet)
    : symbols_(std::move(symbols)), alphabet_(alphabet) {
    if (alphabet_ == 0 || alphabet_ > 10) throw Error("alphabet size must be in 1..10");
    for (Symbol s : symbols_)
        if (s >= alphabet_) throw Error("symbol out of alphabet");
}

Word Word::parse(std::string_view digits, unsigned alphabet) {
    std::vector<Symbol> out;
    out.reserve(digits.size());
    for (char c : digits) {
        if (c < '0' || c > '9') throw Error("word must be an ASCII digit string");
        out.push_back(static_cast<Symbol>(c - '0'));
    }
    return Word(std::move(out), alphabet);
}

Word Word::concat(const Word& other) const {
    if (other.alphabet_ != alphabet_) throw Error("alphabet mismatch");
    std::vector<Symbol> out = symbols_;
    out.insert(out.end(), other.symbols_.begin(), other.symbols_.end());
    Word w;
    w.symbols_ = std::move(out);
    w.alphabet_ = alphabet_;
    return w;
}

Word Word::prefix(std::size_t n) const {
    Word w;
    w.alphabet_ = alphabet_;
    w.symbols_.assign(symbols_.begin(), symbols_.begin() + std::min(n, symbols_.size()));
    return w;
}

std::string Word::str() const {
    std::string s(symbols_.size(), '0');
    for (std::size_t i = 0; i < symbols_.size(); ++i) s[i] = static_cast<char>('0' + symbols_[i]);
    return s;
}

std::vector<double> word_frequency(const Word& w) {
    if (w.empty()) throw Error("empty word");
    std::vector<double> q(w.alphabet(), 0.0);
    for (Symbol s : w.symbols()) q[s] += 1.0;
    for (double& v : q) v /= static_cast<double>(w.length());
    return q;
}

BernoulliModel::BernoulliModel(std::vector<double> weights, std::vector<double> log_slopes)
    : weights_(std::move(weights)), log_slopes_(std::move(log_slopes)) {
    if (weights_.empty() || weights_.size() != log_slopes_.size())
        throw Error("weights and log_slopes must be nonempty and of equal length");
    double total = 0.0;
    for (double p : weights_) {
        if (!(p >= 0.0)) throw Error("negative weight");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw Error("weights must sum to 1");
}

std::vector<Symbol> BernoulliModel::support() const {
    std::vector<Symbol> out;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] > 0.0) out.push_back(static_cast<Symbol>(i));
    return out;
}

double entropy_of(std::span<const double> p) {
    double h = 0.0;
    for (double v : p)
        if (v > 0.0) h -= v * std::log(v);
    return h;
}

double BernoulliModel::entropy() const { return entropy_of(weights_); }

double BernoulliModel::exponent() const {
    double a = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] > 0.0) a += weights_[i] * log_slopes_[i];
    return a;
}

nlohmann::json BernoulliModel::to_json() const {
    return {{"weights", weights_}, {"log_slopes", log_slopes_}};
}

BernoulliModel BernoulliModel::from_json(const nlohmann::json& j) {
    return BernoulliModel(j.at("weights").get<std::vector<double>>(),
                          j.at("log_slopes").get<std::vector<double>>());
}

double bernoulli_entropy(const BernoulliModel& m) { return m.entropy(); }

namespace {

void enumerate_from(std::vector<Symbol>& buf, std::size_t length, std::span<const Symbol> letters,
                    const WordFilter& filter, unsigned alphabet, std::vector<Word>& out) {
    if (buf.size() == length) {
        if (!filter.accept || filter.accept(buf)) out.emplace_back(buf, alphabet);
        return;
    }
    for (Symbol s : letters) {
        buf.push_back(s);
        if (!filter.prefix_ok || filter.prefix_ok(buf))
            enumerate_from(buf, length, letters, filter, alphabet, out);
        buf.pop_back();
    }
}

}  // namespace

std::vector<Word> enumerate_words(std::size_t length, unsigned alphabet, const WordFilter& filter,
                                  std::span<const Symbol> letters, std::size_t cap, unsigned jobs) {
    if (length > cap) throw Error("enumeration too large");
    std::vector<Symbol> all;
    if (letters.empty()) {
        for (unsigned s = 0; s < alphabet; ++s) all.push_back(static_cast<Symbol>(s));
    } else {
        all.assign(letters.begin(), letters.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        for (Symbol s : all)
            if (s >= alphabet) throw Error("symbol out of alphabet");
    }

    // Split the tree at a shallow depth so subtrees can be explored
    // independently; concatenating the per-seed results in seed order keeps
    // the output lexicographic.
    std::size_t split = 0;
    std::size_t seeds = 1;
    while (split < length && seeds < 64) {
        ++split;
        seeds *= all.size();
    }
    std::vector<std::vector<Symbol>> prefixes{{}};
    for (std::size_t d = 0; d < split; ++d) {
        std::vector<std::vector<Symbol>> next;
        for (const auto& p : prefixes)
            for (Symbol s : all) {
                auto q = p;
                q.push_back(s);
                if (!filter.prefix_ok || filter.prefix_ok(q)) next.push_back(std::move(q));
            }
        prefixes = std::move(next);
    }

    std::vector<std::vector<Word>> parts(prefixes.size());
    parallel_for(prefixes.size(), jobs, [&](std::size_t i) {
        std::vector<Symbol> buf = prefixes[i];
        buf.reserve(length);
        enumerate_from(buf, length, all, filter, alphabet, parts[i]);
    });
    std::vector<Word> out;
    for (auto& p : parts) out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    return out;
}

}  // namespace blendlab
