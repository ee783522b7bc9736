// Compiled with -mavx2 (and deliberately without -mfma, so products and
// sums round exactly like the scalar reference).

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "blendlab/kernels.hpp"

namespace blendlab::kernels::avx2 {

void piecewise_lift_step(const PiecewiseTable& t, std::span<double> x, std::span<double> acc) {
    const std::size_t pieces = t.slopes.size();
    const std::size_t n = x.size();
    const __m256d deg = _mm256_set1_pd(static_cast<double>(t.degree));
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        const __m256d fl = _mm256_floor_pd(xv);
        const __m256d u = _mm256_sub_pd(xv, fl);
        __m256d slope = _mm256_set1_pd(t.slopes[0]);
        __m256d offset = _mm256_set1_pd(t.offsets[0]);
        __m256d logs = _mm256_set1_pd(t.log_slopes[0]);
        for (std::size_t j = 1; j < pieces; ++j) {
            const __m256d mask = _mm256_cmp_pd(u, _mm256_set1_pd(t.breakpoints[j]), _CMP_GE_OQ);
            slope = _mm256_blendv_pd(slope, _mm256_set1_pd(t.slopes[j]), mask);
            offset = _mm256_blendv_pd(offset, _mm256_set1_pd(t.offsets[j]), mask);
            logs = _mm256_blendv_pd(logs, _mm256_set1_pd(t.log_slopes[j]), mask);
        }
        const __m256d law = _mm256_add_pd(_mm256_mul_pd(slope, u), offset);
        _mm256_storeu_pd(x.data() + i, _mm256_add_pd(_mm256_mul_pd(deg, fl), law));
        _mm256_storeu_pd(acc.data() + i, _mm256_add_pd(_mm256_loadu_pd(acc.data() + i), logs));
    }
    if (i < n) scalar::piecewise_lift_step(t, x.subspan(i), acc.subspan(i));
}

std::pair<double, double> minmax(std::span<const double> v) {
    const std::size_t n = v.size();
    __m256d lo = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d hi = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(v.data() + i);
        lo = _mm256_min_pd(lo, a);
        hi = _mm256_max_pd(hi, a);
    }
    alignas(32) double l[4];
    alignas(32) double h[4];
    _mm256_store_pd(l, lo);
    _mm256_store_pd(h, hi);
    double rlo = std::min(std::min(l[0], l[1]), std::min(l[2], l[3]));
    double rhi = std::max(std::max(h[0], h[1]), std::max(h[2], h[3]));
    for (; i < n; ++i) {
        rlo = std::min(rlo, v[i]);
        rhi = std::max(rhi, v[i]);
    }
    return {rlo, rhi};
}

void envelope_min_slack(std::span<const double> increments, std::size_t words, std::size_t m,
                        double center, double c0, double c1, std::span<double> out) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d vc0 = _mm256_set1_pd(c0);
    const __m256d vc1 = _mm256_set1_pd(c1);
    const __m256d vcenter = _mm256_set1_pd(center);
    const double* base = increments.data();
    std::size_t w = 0;
    // Four words per vector; row stride m, so lanes are gathered by index.
    const __m128i lane = _mm_set_epi32(3, 2, 1, 0);
    for (; w + 4 <= words; w += 4) {
        const __m128i idx = _mm_mullo_epi32(lane, _mm_set1_epi32(static_cast<int>(m)));
        const double* rows = base + w * m;
        __m256d s = _mm256_setzero_pd();
        __m256d worst = vc0;
        for (std::size_t l = 1; l <= m; ++l) {
            s = _mm256_add_pd(s, _mm256_i32gather_pd(rows + (l - 1), idx, 8));
            const __m256d dl = _mm256_set1_pd(static_cast<double>(l));
            const __m256d bound = _mm256_add_pd(vc0, _mm256_mul_pd(dl, vc1));
            const __m256d dev = _mm256_andnot_pd(sign, _mm256_sub_pd(s, _mm256_mul_pd(dl, vcenter)));
            worst = _mm256_min_pd(worst, _mm256_sub_pd(bound, dev));
        }
        _mm256_storeu_pd(out.data() + w, worst);
    }
    if (w < words)
        scalar::envelope_min_slack(increments.subspan(w * m), words - w, m, center, c0, c1,
                                   out.subspan(w));
}

}  // namespace blendlab::kernels::avx2
