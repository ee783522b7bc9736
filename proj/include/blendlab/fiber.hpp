#pragma once

// Circle fiber maps: piecewise-affine laws on [0,1) read modulo 1, a smooth
// slope-modulated family for distortion experiments, derivative cocycles
// along words, and the finite-time distortion meter.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "blendlab/kernels.hpp"
#include "blendlab/symbolic.hpp"
#include "json.hpp"

namespace blendlab {

// A closed arc of the circle given by a lift [lo, hi] with hi >= lo.
struct Arc {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const;
    bool contains(const Arc& inner) const;
};

// The overlap of two arcs, each shorter than half the circle; the result
// is expressed in the lift of `a`.
std::optional<Arc> intersect(const Arc& a, const Arc& b);

double wrap01(double x);

class PiecewiseAffineMap {
public:
    // Piece i covers [breakpoints[i], breakpoints[i+1]) with law
    // slopes[i] * x + offsets[i]; the last piece ends at 1.
    PiecewiseAffineMap(std::vector<double> breakpoints, std::vector<double> slopes,
                       std::vector<double> offsets);

    static PiecewiseAffineMap rotation(double rho);
    static PiecewiseAffineMap from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    std::size_t pieces() const { return slopes_.size(); }
    std::size_t piece_index(double x) const;  // x taken modulo 1
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& slopes() const { return slopes_; }
    const std::vector<double>& offsets() const { return offsets_; }

    int degree() const { return degree_; }
    double operator()(double x) const { return wrap01(lift(x)); }
    double lift(double x) const;
    double derivative(double x) const { return slopes_[piece_index(x)]; }

    // Points where the slope or the law jumps (circle convention, so a
    // law that continues across 0 does not count 0).
    const std::vector<double>& kinks() const { return kinks_; }
    bool at_kink(double x) const;
    bool kink_inside(const Arc& a) const;  // strictly interior to a

    // Increasing, continuous, degree-one maps are circle homeomorphisms;
    // image and preimage below require it.
    bool is_homeomorphism() const { return homeomorphism_; }
    double inverse_lift(double y) const;
    Arc image(const Arc& a) const;
    Arc preimage(const Arc& a) const;

    double min_abs_slope() const;
    double max_abs_slope() const;

    // View for the batch kernels; valid while the map is alive.
    kernels::PiecewiseTable table() const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> slopes_;
    std::vector<double> offsets_;
    std::vector<double> log_slopes_;
    std::vector<double> kinks_;
    int degree_ = 0;
    bool homeomorphism_ = false;
};

// x -> base*x + amp/(2 pi) * (1 - cos(2 pi x)) + offset, whose slope field
// is base + amp*sin(2 pi x).
class SineModulatedMap {
public:
    SineModulatedMap(double base_slope, double amplitude, double offset = 0.0);

    double lift(double x) const;
    double operator()(double x) const { return wrap01(lift(x)); }
    double derivative(double x) const;
    double base_slope() const { return base_; }
    double amplitude() const { return amp_; }

private:
    double base_;
    double amp_;
    double offset_;
};

double iterate(const PiecewiseAffineMap& f, double x, std::size_t n);

struct CocycleProduct {
    Word word;
    double start = 0.0;
    std::vector<double> partial_logs;  // partial_logs[l] = sum_{j<l} log|f'(x_j)|

    double final_log() const { return partial_logs.back(); }
};

// maps[s] is the fiber map of symbol s. Only kinks make the derivative
// ambiguous; a breakpoint across which the law continues is harmless.
CocycleProduct cocycle(std::span<const PiecewiseAffineMap> maps, const Word& word, double x);

// sup over pairs x, y in an interval of |log Df(x) - log Df(y)|, where
// Df(y) ranges over the samples; delta is the half-length.
double modulus_of_continuity(const SineModulatedMap& f, double delta, std::size_t grid = 2048,
                             std::size_t offsets = 64);
double modulus_of_continuity(const PiecewiseAffineMap& f, double delta, std::size_t grid = 2048,
                             std::size_t offsets = 64);

struct DistortionReport {
    Arc interval;
    std::size_t horizon = 0;
    std::vector<double> max_log_dist;  // index l = 0..horizon
    std::vector<bool> flagged;         // image met a kink at step l
    std::vector<std::pair<double, double>> modulus;  // (delta, Mod(delta))
};

inline constexpr std::size_t kDistortionSamples = 1024;

DistortionReport distortion_meter(const PiecewiseAffineMap& f, const Arc& interval, std::size_t m,
                                  std::size_t samples = kDistortionSamples);
DistortionReport distortion_meter(const SineModulatedMap& f, const Arc& interval, std::size_t m,
                                  std::size_t samples = kDistortionSamples);

// Half-length r = delta0 / K * exp(-m (eps + eps_D)) of central curves on
// which the l-step distortion stays below l * eps_D.
double distortion_radius(double delta0, double K, double eps, double eps_D, std::size_t m);

}  // namespace blendlab
