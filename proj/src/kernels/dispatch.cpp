#include <atomic>
#include <cstdlib>
#include <cstring>

#include "blendlab/error.hpp"
#include "blendlab/kernels.hpp"

namespace blendlab::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend initial_backend() {
    // BLENDLAB_KERNELS=scalar pins the reference path.
    if (const char* env = std::getenv("BLENDLAB_KERNELS"); env && std::strcmp(env, "scalar") == 0)
        return Backend::Scalar;
    return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
    static std::atomic<Backend> b{initial_backend()};
    return b;
}

}  // namespace

bool available(Backend b) { return b == Backend::Scalar || cpu_has_avx2(); }

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (!available(b)) throw Error("kernel backend not available on this CPU");
    current().store(b, std::memory_order_relaxed);
}

std::string_view name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void piecewise_lift_step(const PiecewiseTable& t, std::span<double> x, std::span<double> acc) {
    if (active_backend() == Backend::Avx2) return avx2::piecewise_lift_step(t, x, acc);
    scalar::piecewise_lift_step(t, x, acc);
}

std::pair<double, double> minmax(std::span<const double> v) {
    if (active_backend() == Backend::Avx2) return avx2::minmax(v);
    return scalar::minmax(v);
}

void envelope_min_slack(std::span<const double> increments, std::size_t words, std::size_t m,
                        double center, double c0, double c1, std::span<double> out) {
    if (active_backend() == Backend::Avx2)
        return avx2::envelope_min_slack(increments, words, m, center, c0, c1, out);
    scalar::envelope_min_slack(increments, words, m, center, c0, c1, out);
}

}  // namespace blendlab::kernels
