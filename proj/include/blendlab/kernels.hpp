#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and an AVX2
// variant; the dispatching entry points pick one at runtime. The variants
// are required to agree to the last few ulps (see tests/test_kernels.cpp).

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>

namespace blendlab::kernels {

enum class Backend { Scalar, Avx2 };

bool available(Backend b);
Backend active_backend();
// Forces a backend (tests, benchmarking). Throws Error if unavailable.
void set_backend(Backend b);
std::string_view name(Backend b);

// Flattened piecewise-affine lift: piece i covers [breakpoints[i],
// breakpoints[i+1]) with law slopes[i]*x + offsets[i]; log_slopes[i] is
// log|slopes[i]|.
struct PiecewiseTable {
    std::span<const double> breakpoints;
    std::span<const double> slopes;
    std::span<const double> offsets;
    std::span<const double> log_slopes;
    int degree = 1;
};

// One step of the lifted map on every point: x <- F(x), acc += log|F'(x)|.
void piecewise_lift_step(const PiecewiseTable& t, std::span<double> x, std::span<double> acc);

std::pair<double, double> minmax(std::span<const double> v);

// increments is row-major words x m. For each word computes
//   min_{l=0..m} (c0 + l*c1) - |S_l - l*center|,  S_l = prefix sum,
// i.e. the worst slack of the two-sided envelope.
void envelope_min_slack(std::span<const double> increments, std::size_t words, std::size_t m,
                        double center, double c0, double c1, std::span<double> out);

namespace scalar {
void piecewise_lift_step(const PiecewiseTable& t, std::span<double> x, std::span<double> acc);
std::pair<double, double> minmax(std::span<const double> v);
void envelope_min_slack(std::span<const double> increments, std::size_t words, std::size_t m,
                        double center, double c0, double c1, std::span<double> out);
}  // namespace scalar

namespace avx2 {
void piecewise_lift_step(const PiecewiseTable& t, std::span<double> x, std::span<double> acc);
std::pair<double, double> minmax(std::span<const double> v);
void envelope_min_slack(std::span<const double> increments, std::size_t words, std::size_t m,
                        double center, double c0, double c1, std::span<double> out);
}  // namespace avx2

}  // namespace blendlab::kernels
