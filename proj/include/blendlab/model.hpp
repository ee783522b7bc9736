#pragma once

// The four-symbol step skew-product testbed: blender legs (0, 1), a
// contraction (2) and an irrational-like rotation (3), plus the
// breadth-first connecting-time search.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blendlab/blender.hpp"
#include "blendlab/fiber.hpp"
#include "blendlab/symbolic.hpp"
#include "json.hpp"

namespace blendlab {

struct TestbedParams {
    double lambda = 1.5;
    double eps = 0.25;
    double delta = 0.05;
    double beta = 1.0 / 1.5;
    double rho_rot = 610.0 / 987.0;
    unsigned grid_bits = 8;
    // Half-width of the zone around the anchor where symbol 2 has slope beta.
    double charged_half_width = 0.4;

    nlohmann::json to_json() const;
};

class SkewProductSystem {
public:
    SkewProductSystem(std::vector<PiecewiseAffineMap> maps, BlenderSpec blender, double anchor);

    unsigned k() const { return static_cast<unsigned>(maps_.size()); }
    std::span<const PiecewiseAffineMap> maps() const { return maps_; }
    const PiecewiseAffineMap& map(Symbol s) const { return maps_[s]; }
    const BlenderSpec& blender() const { return blender_; }

    // Fiber point fixed by the symbols that test measures charge.
    double anchor() const { return anchor_; }
    bool fixes_anchor(Symbol s) const;
    // log|slope| of each symbol at the anchor.
    std::vector<double> anchor_log_slopes() const;
    BernoulliModel bernoulli(std::vector<double> weights) const;

    double min_slope() const { return m_; }  // frak m
    double max_slope() const { return M_; }  // frak M
    double min_piece_length() const;

    // Orbit lift of x under a word (first letter applied first).
    double apply_lift(const Word& w, double x) const;
    Arc image(const Word& w, const Arc& a) const;
    Arc preimage(const Word& w, const Arc& a) const;

    nlohmann::json to_json() const;

private:
    std::vector<PiecewiseAffineMap> maps_;
    BlenderSpec blender_;
    double anchor_;
    double m_ = 0.0;
    double M_ = 0.0;
};

SkewProductSystem default_testbed(const TestbedParams& p = {});

// The middle third of (P, Q).
Arc default_target(const BlenderSpec& b);

struct AccessOptions {
    unsigned grid_bits = 8;
    std::size_t horizon = 64;
    std::size_t node_budget = 1u << 20;
    bool refine = true;  // double the grid until t_con repeats
    unsigned max_refinements = 4;
};

struct AccessibilityReport {
    std::size_t t_con = 0;
    std::size_t t_forward = 0;
    std::size_t t_backward = 0;
    unsigned grid_bits = 0;
    double delta = 0.0;
    Arc target;
    // forward[c] carries the ball of cell c into the target.
    std::vector<Word> forward;
    // backward[c] is a forward word u whose inverse carries the ball of cell
    // c into the target, i.e. the ball lies in the u-image of the target.
    std::vector<Word> backward;
    std::vector<std::pair<unsigned, std::size_t>> refinement;  // (grid_bits, t_con)

    double cell_center(std::size_t c) const;
    Arc ball(std::size_t c) const;
    nlohmann::json to_json() const;
};

AccessibilityReport connecting_time(const SkewProductSystem& sys, const Arc& target, double delta,
                                    const AccessOptions& opt = {});

enum class Direction { Forward, Backward };

// A word u with F_u(query) inside the target (Forward) or query inside
// F_u(target) (Backward). Among the words no longer than max(max_length,
// shortest possible) it returns the least expanding one, first in
// breadth-first order on ties. Throws "system not accessible at this
// resolution" past the horizon.
Word connecting_word(const SkewProductSystem& sys, const Arc& query, const Arc& target, Direction dir,
                     std::size_t horizon = 64, std::size_t node_budget = 1u << 20, std::size_t max_length = 0);

}  // namespace blendlab
