#include "blendlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>

#include "blendlab/error.hpp"

namespace blendlab {

nlohmann::json TestbedParams::to_json() const {
    return {{"lambda", lambda}, {"eps", eps},         {"delta", delta},
            {"beta", beta},     {"rho_rot", rho_rot}, {"grid_bits", grid_bits},
            {"charged_half_width", charged_half_width}};
}

SkewProductSystem::SkewProductSystem(std::vector<PiecewiseAffineMap> maps, BlenderSpec blender, double anchor)
    : maps_(std::move(maps)), blender_(blender), anchor_(anchor) {
    if (maps_.empty() || maps_.size() > 10) throw Error("alphabet size must be in 1..10");
    if (blender_.leg_a >= maps_.size() || blender_.leg_b >= maps_.size()) throw Error("bad leg symbols");
    for (const auto& f : maps_)
        if (!f.is_homeomorphism()) throw Error("fiber maps must be circle homeomorphisms");
    m_ = maps_[0].min_abs_slope();
    M_ = maps_[0].max_abs_slope();
    for (const auto& f : maps_) {
        m_ = std::min(m_, f.min_abs_slope());
        M_ = std::max(M_, f.max_abs_slope());
    }
}

bool SkewProductSystem::fixes_anchor(Symbol s) const {
    return maps_[s].lift(anchor_) == anchor_ && !maps_[s].at_kink(anchor_);
}

std::vector<double> SkewProductSystem::anchor_log_slopes() const {
    std::vector<double> out(k());
    for (unsigned s = 0; s < k(); ++s) out[s] = std::log(std::abs(maps_[s].derivative(anchor_)));
    return out;
}

BernoulliModel SkewProductSystem::bernoulli(std::vector<double> weights) const {
    if (weights.size() != k()) throw Error("one weight per symbol required");
    return BernoulliModel(std::move(weights), anchor_log_slopes());
}

double SkewProductSystem::min_piece_length() const {
    double v = 1.0;
    for (const auto& f : maps_) {
        const auto& b = f.breakpoints();
        for (std::size_t i = 0; i < b.size(); ++i) v = std::min(v, (i + 1 < b.size() ? b[i + 1] : 1.0) - b[i]);
    }
    return v;
}

double SkewProductSystem::apply_lift(const Word& w, double x) const {
    for (Symbol s : w.symbols()) x = maps_[s].lift(x);
    return x;
}

Arc SkewProductSystem::image(const Word& w, const Arc& a) const {
    Arc cur = a;
    for (Symbol s : w.symbols()) cur = maps_[s].image(cur);
    return cur;
}

Arc SkewProductSystem::preimage(const Word& w, const Arc& a) const {
    Arc cur = a;
    for (std::size_t i = w.length(); i-- > 0;) cur = maps_[w[i]].preimage(cur);
    return cur;
}

nlohmann::json SkewProductSystem::to_json() const {
    nlohmann::json maps = nlohmann::json::array();
    for (const auto& f : maps_) maps.push_back(f.to_json());
    return {{"k", k()},         {"fiber_maps", maps},        {"blender", blender_.to_json()},
            {"anchor", anchor_}, {"bounds", {{"m", m_}, {"M", M_}}}};
}

SkewProductSystem default_testbed(const TestbedParams& p) {
    const BlenderSpec b(p.lambda, p.eps, p.delta, 0, 1, 4);
    const double right = b.Q() + b.delta;  // domain is [-delta, right] mod 1
    const double len = right + b.delta;
    if (!(len < 1.0)) throw Error("blender domain longer than the circle");
    if (!(p.lambda * len < 1.0)) throw Error("blender leg image longer than the circle");
    if (!(p.beta > 0.0 && p.beta < 1.0)) throw Error("contraction slope beta must lie in (0,1)");
    const double c = p.charged_half_width;
    if (!(c > 0.0 && c < 0.5) || !(2.0 * p.beta * c < 1.0)) throw Error("bad charged zone");

    // Leg laws on the domain, one affine bridge over the complement.
    const double bridge = (1.0 - p.lambda * len) / (1.0 - len);
    auto leg = [&](double shift) {
        return PiecewiseAffineMap({0.0, right, 1.0 - b.delta},
                                  {p.lambda, bridge, p.lambda},
                                  {-shift, p.lambda * right - bridge * right - shift, 1.0 - p.lambda - shift});
    };
    const double s2 = (1.0 - 2.0 * p.beta * c) / (1.0 - 2.0 * c);
    PiecewiseAffineMap contraction({0.0, c, 1.0 - c}, {p.beta, s2, p.beta},
                                   {0.0, p.beta * c - s2 * c, 1.0 - p.beta});
    std::vector<PiecewiseAffineMap> maps{leg(0.0), leg(p.eps), contraction,
                                         PiecewiseAffineMap::rotation(p.rho_rot)};
    return SkewProductSystem(std::move(maps), b, 0.0);
}

Arc default_target(const BlenderSpec& b) {
    const double third = (b.Q() - b.P()) / 3.0;
    return {b.P() + third, b.Q() - third};
}

// ---------------------------------------------------------------------------
// Breadth-first search over images or preimages of the target.

namespace {

struct Node {
    Arc arc;
    std::uint32_t parent;
    Symbol symbol;
    std::uint16_t depth;
};

Arc normalized(Arc a) {
    if (a.width() >= 1.0) return {0.0, 1.0};
    const double shift = std::floor(a.lo);
    return {a.lo - shift, a.hi - shift};
}

class ArcSearch {
public:
    ArcSearch(const SkewProductSystem& sys, const Arc& target, Direction dir, std::size_t budget)
        : sys_(sys), dir_(dir), budget_(budget) {
        nodes_.push_back({normalized(target), 0, 0, 0});
        remember(nodes_[0].arc);
    }

    // Expands one more level; returns the index range of the new nodes.
    std::pair<std::size_t, std::size_t> expand(std::size_t lo, std::size_t hi) {
        const std::size_t first = nodes_.size();
        for (std::size_t i = lo; i < hi; ++i) {
            for (unsigned s = 0; s < sys_.k(); ++s) {
                const auto& f = sys_.map(static_cast<Symbol>(s));
                const Arc a = normalized(dir_ == Direction::Forward ? f.preimage(nodes_[i].arc)
                                                                    : f.image(nodes_[i].arc));
                if (!remember(a)) continue;
                if (nodes_.size() >= budget_) throw Error("system not accessible at this resolution");
                nodes_.push_back({a, static_cast<std::uint32_t>(i), static_cast<Symbol>(s),
                                  static_cast<std::uint16_t>(nodes_[i].depth + 1)});
            }
        }
        return {first, nodes_.size()};
    }

    const Node& node(std::size_t i) const { return nodes_[i]; }

    Word word(std::size_t i) const {
        std::vector<Symbol> w;
        for (; i != 0; i = nodes_[i].parent) w.push_back(nodes_[i].symbol);
        // Forward nodes prepend their symbol, so the chain already reads
        // first-applied first; backward nodes append theirs.
        if (dir_ == Direction::Backward) std::reverse(w.begin(), w.end());
        return Word(std::move(w), sys_.k());
    }

private:
    bool remember(const Arc& a) {
        constexpr double q = 1e12;
        return seen_.emplace(std::llround(a.lo * q), std::llround(a.width() * q)).second;
    }

    const SkewProductSystem& sys_;
    Direction dir_;
    std::size_t budget_;
    std::vector<Node> nodes_;
    std::set<std::pair<long long, long long>> seen_;
};

struct GridResult {
    std::size_t t = 0;
    std::vector<Word> witness;
};

GridResult grid_search(const SkewProductSystem& sys, const Arc& target, double delta, unsigned bits,
                       Direction dir, const AccessOptions& opt) {
    const std::size_t cells = std::size_t{1} << bits;
    const double r = delta / 4.0;
    const double h = 1.0 / static_cast<double>(cells);
    std::vector<long> hit(cells, -1);
    std::size_t missing = cells;
    GridResult out;

    ArcSearch search(sys, target, dir, opt.node_budget);
    auto absorb = [&](std::size_t i) {
        const Arc& a = search.node(i).arc;
        if (a.width() < 2.0 * r) return;
        // Cells whose centre lies in [a.lo + r, a.hi - r].
        const double from = a.lo + r;
        const double to = a.hi - r;
        const long c0 = static_cast<long>(std::ceil((from - 0.5 * h) / h));
        const long n = static_cast<long>(cells);
        for (long c = c0; c - c0 < n && (static_cast<double>(c) + 0.5) * h <= to; ++c) {
            const std::size_t idx = static_cast<std::size_t>(((c % n) + n) % n);
            const double x = (static_cast<double>(idx) + 0.5) * h;
            if (hit[idx] >= 0 || !a.contains(Arc{x - r, x + r})) continue;
            hit[idx] = static_cast<long>(i);
            --missing;
            out.t = search.node(i).depth;
        }
    };

    absorb(0);
    std::size_t lo = 0, hi = 1;
    for (std::size_t depth = 0; missing > 0; ++depth) {
        if (depth >= opt.horizon || lo == hi) throw Error("system not accessible at this resolution");
        std::tie(lo, hi) = search.expand(lo, hi);
        for (std::size_t i = lo; i < hi && missing > 0; ++i) absorb(i);
    }
    out.witness.reserve(cells);
    for (std::size_t c = 0; c < cells; ++c) out.witness.push_back(search.word(static_cast<std::size_t>(hit[c])));
    return out;
}

AccessibilityReport access_at(const SkewProductSystem& sys, const Arc& target, double delta, unsigned bits,
                              const AccessOptions& opt) {
    AccessibilityReport r;
    r.grid_bits = bits;
    r.delta = delta;
    r.target = target;
    GridResult f = grid_search(sys, target, delta, bits, Direction::Forward, opt);
    GridResult b = grid_search(sys, target, delta, bits, Direction::Backward, opt);
    r.t_forward = f.t;
    r.t_backward = b.t;
    r.t_con = std::max(f.t, b.t);
    r.forward = std::move(f.witness);
    r.backward = std::move(b.witness);
    return r;
}

}  // namespace

double AccessibilityReport::cell_center(std::size_t c) const {
    return (static_cast<double>(c) + 0.5) / static_cast<double>(std::size_t{1} << grid_bits);
}

Arc AccessibilityReport::ball(std::size_t c) const {
    const double x = cell_center(c);
    return {x - delta / 4.0, x + delta / 4.0};
}

nlohmann::json AccessibilityReport::to_json() const {
    nlohmann::json fw = nlohmann::json::array();
    nlohmann::json bw = nlohmann::json::array();
    for (const auto& w : forward) fw.push_back(w.str());
    for (const auto& w : backward) bw.push_back(w.str());
    nlohmann::json ref = nlohmann::json::array();
    for (const auto& [bits, t] : refinement) ref.push_back({{"grid_bits", bits}, {"t_con", t}});
    return {{"t_con", t_con},         {"t_forward", t_forward}, {"t_backward", t_backward},
            {"grid_bits", grid_bits}, {"delta", delta},         {"target", {target.lo, target.hi}},
            {"refinement", ref},      {"forward", fw},          {"backward", bw}};
}

AccessibilityReport connecting_time(const SkewProductSystem& sys, const Arc& target, double delta,
                                    const AccessOptions& opt) {
    if (!(delta > 0.0)) throw Error("delta must be positive");
    const BlenderSpec& b = sys.blender();
    if (!(target.lo > b.P() && target.hi < b.Q() && target.width() > 0.0))
        throw Error("target must lie strictly inside the in-between region");

    AccessibilityReport r = access_at(sys, target, delta, opt.grid_bits, opt);
    std::vector<std::pair<unsigned, std::size_t>> trail{{r.grid_bits, r.t_con}};
    if (opt.refine) {
        for (unsigned i = 1; i <= opt.max_refinements; ++i) {
            AccessibilityReport next = access_at(sys, target, delta, opt.grid_bits + i, opt);
            trail.emplace_back(next.grid_bits, next.t_con);
            const bool stable = next.t_con == r.t_con;
            r = std::move(next);
            if (stable) break;
        }
    }
    r.refinement = std::move(trail);
    return r;
}

Word connecting_word(const SkewProductSystem& sys, const Arc& query, const Arc& target, Direction dir,
                     std::size_t horizon, std::size_t node_budget, std::size_t max_length) {
    ArcSearch search(sys, target, dir, node_budget);
    const double tw = normalized(target).width();
    // Mean log-slope of the word across the target correspondence.
    auto expansion = [&](const Arc& a) { return dir == Direction::Forward ? std::log(tw / a.width())
                                                                          : std::log(a.width() / tw); };
    std::size_t lo = 0, hi = 1;
    long best = -1;
    for (std::size_t depth = 0;; ++depth) {
        for (std::size_t i = lo; i < hi; ++i) {
            const Arc& a = search.node(i).arc;
            if (!a.contains(query)) continue;
            if (best < 0 || expansion(a) < expansion(search.node(static_cast<std::size_t>(best)).arc))
                best = static_cast<long>(i);
        }
        if (best >= 0 && depth >= max_length) break;
        if (depth >= horizon || lo == hi) throw Error("system not accessible at this resolution");
        std::tie(lo, hi) = search.expand(lo, hi);
    }
    return search.word(static_cast<std::size_t>(best));
}

}  // namespace blendlab
