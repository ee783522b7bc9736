#pragma once

// The affine unstable blender: two legs x -> lambda*x and x -> lambda*x - eps
// acting on a central interval, strips reduced to their central interval,
// and the covering procedure that grows an in-between strip until it
// reaches both fixed points.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blendlab/fiber.hpp"
#include "blendlab/symbolic.hpp"
#include "json.hpp"

namespace blendlab {

enum class Leg { A, B };

struct BlenderSpec {
    double lambda = 1.5;
    double eps = 0.25;
    double delta = 0.05;
    Symbol leg_a = 0;
    Symbol leg_b = 1;
    unsigned alphabet = 2;  // alphabet of the history words

    BlenderSpec() = default;
    BlenderSpec(double lambda, double eps, double delta, Symbol leg_a = 0, Symbol leg_b = 1,
                unsigned alphabet = 2);

    double P() const { return 0.0; }
    double Q() const { return eps / (lambda - 1.0); }
    double xP() const { return eps / lambda; }
    double xQ() const { return eps / (lambda * (lambda - 1.0)); }
    double rho_min() const { return xQ() - xP(); }
    double tau() const { return xQ() - P(); }
    double nu() const { return Q() - P(); }
    double lambda_bh() const { return lambda; }
    Arc domain() const { return {-delta, Q() + delta}; }

    Symbol symbol(Leg leg) const { return leg == Leg::A ? leg_a : leg_b; }
    double law(Leg leg, double x) const { return leg == Leg::A ? lambda * x : lambda * x - eps; }

    nlohmann::json to_json() const;
};

class UStrip {
public:
    UStrip(Arc central, Word history);
    UStrip(double lo, double hi, unsigned alphabet = 2) : UStrip(Arc{lo, hi}, Word({}, alphabet)) {}

    const Arc& central() const { return central_; }
    const Word& history() const { return history_; }
    double width() const { return central_.width(); }

private:
    Arc central_;
    Word history_;
};

bool in_between(const BlenderSpec& b, const UStrip& s);
bool c_complete(const BlenderSpec& b, const UStrip& s);

// The unclipped image of a central interval under one leg.
Arc leg_image(const BlenderSpec& b, const Arc& a, Leg leg);

// Image clipped to the blender domain; throws "strip escaped" when the
// image misses the domain.
UStrip apply_leg(const BlenderSpec& b, const UStrip& s, Leg leg);

enum class StripClass { LeftOfXQ, RightOfXP, SpansBoth };
StripClass classify(const BlenderSpec& b, const UStrip& s);
std::string to_string(StripClass c);

inline constexpr double kDefaultCoverC = 2.0;

std::size_t ell_bound(const BlenderSpec& b, double w, double C);

struct CoveringReport {
    Word steps;
    UStrip final;
    // The part of the input strip that the composed legs carry exactly onto
    // `final`, with every intermediate image inside the domain.
    Arc source;
    double w0 = 0.0;
    std::size_t ell_measured = 0;
    std::size_t ell_bound = 0;
    double C_fitted = 0.0;  // this run's residual ell - 1 - |log w0|/log lambda

    nlohmann::json to_json() const;
};

CoveringReport cover(const BlenderSpec& b, const UStrip& s, double C = kDefaultCoverC);

// Strip of width w centred at Q/2, the midpoint of the in-between region.
UStrip centered_strip(const BlenderSpec& b, double w);

// Applies the unclipped leg laws to `source`, requiring every image to stay
// inside the domain; returns the final central interval.
Arc replay_legs(const BlenderSpec& b, const Arc& source, const Word& steps);

// Least C (as an attained residual) with ell(w) <= ceil(|log w|/log lambda + C) + 1
// for all sampled widths. Throws "no samples" on an empty list.
double fit_C(const BlenderSpec& b, std::span<const double> widths);

// OLS slope of ell_measured against |log w|.
double log_law_slope(std::span<const double> widths, std::span<const std::size_t> ells);

inline constexpr const char* kCoverCsvHeader = "# blendlab cover csv v1\nw,ell_measured,ell_bound,C_fitted\n";
std::string to_csv_row(const CoveringReport& r);

}  // namespace blendlab
