#include <algorithm>
#include <cmath>
#include <limits>

#include "blendlab/kernels.hpp"

namespace blendlab::kernels::scalar {

void piecewise_lift_step(const PiecewiseTable& t, std::span<double> x, std::span<double> acc) {
    const std::size_t pieces = t.slopes.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fl = std::floor(x[i]);
        const double u = x[i] - fl;
        std::size_t p = 0;
        for (std::size_t j = 1; j < pieces; ++j)
            if (u >= t.breakpoints[j]) p = j;
        x[i] = t.degree * fl + (t.slopes[p] * u + t.offsets[p]);
        acc[i] += t.log_slopes[p];
    }
}

std::pair<double, double> minmax(std::span<const double> v) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double a : v) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
    }
    return {lo, hi};
}

void envelope_min_slack(std::span<const double> increments, std::size_t words, std::size_t m,
                        double center, double c0, double c1, std::span<double> out) {
    for (std::size_t w = 0; w < words; ++w) {
        const double* row = increments.data() + w * m;
        double s = 0.0;
        double worst = c0;
        for (std::size_t l = 1; l <= m; ++l) {
            s += row[l - 1];
            const double dl = static_cast<double>(l);
            worst = std::min(worst, (c0 + dl * c1) - std::abs(s - dl * center));
        }
        out[w] = worst;
    }
}

}  // namespace blendlab::kernels::scalar
