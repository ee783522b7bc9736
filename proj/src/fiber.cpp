#include "blendlab/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "blendlab/error.hpp"

namespace blendlab {

namespace {

constexpr double kLawTol = 1e-12;
constexpr double kKinkTol = 1e-14;

bool close(double a, double b, double tol = kLawTol) {
    return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace

double wrap01(double x) {
    const double r = x - std::floor(x);
    return r >= 1.0 ? 0.0 : r;
}

bool Arc::contains(double x) const {
    if (width() >= 1.0) return true;
    return lo + wrap01(x - lo) <= hi;
}

bool Arc::contains(const Arc& inner) const {
    if (width() >= 1.0) return true;
    if (inner.width() > width()) return false;
    const double s = lo + wrap01(inner.lo - lo);
    return s + inner.width() <= hi;
}

std::optional<Arc> intersect(const Arc& a, const Arc& b) {
    const double base = std::round(a.mid() - b.mid());
    for (double shift : {base, base - 1.0, base + 1.0}) {
        const double lo = std::max(a.lo, b.lo + shift);
        const double hi = std::min(a.hi, b.hi + shift);
        if (lo <= hi) return Arc{lo, hi};
    }
    return std::nullopt;
}

PiecewiseAffineMap::PiecewiseAffineMap(std::vector<double> breakpoints, std::vector<double> slopes,
                                       std::vector<double> offsets)
    : breakpoints_(std::move(breakpoints)), slopes_(std::move(slopes)), offsets_(std::move(offsets)) {
    const std::size_t n = slopes_.size();
    if (n == 0 || breakpoints_.size() != n || offsets_.size() != n)
        throw Error("breakpoints, slopes and offsets must be nonempty and of equal length");
    if (breakpoints_[0] != 0.0) throw Error("first breakpoint must be 0");
    for (std::size_t i = 1; i < n; ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1]) || !(breakpoints_[i] < 1.0))
            throw Error("breakpoints must increase within [0,1)");
    for (double s : slopes_)
        if (s == 0.0 || !std::isfinite(s)) throw Error("slopes must be finite and nonzero");

    log_slopes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) log_slopes_[i] = std::log(std::abs(slopes_[i]));

    auto law = [&](std::size_t i, double x) { return slopes_[i] * x + offsets_[i]; };
    const double span = law(n - 1, 1.0) - law(0, 0.0);
    degree_ = static_cast<int>(std::lround(span));
    bool continuous = close(span, degree_);
    for (std::size_t i = 1; i < n; ++i) {
        const double b = breakpoints_[i];
        const bool jump = !close(law(i - 1, b), law(i, b));
        continuous = continuous && !jump;
        if (jump || !close(slopes_[i - 1], slopes_[i])) kinks_.push_back(b);
    }
    if (!close(span, degree_) || !close(slopes_[n - 1], slopes_[0]))
        kinks_.insert(kinks_.begin(), 0.0);
    homeomorphism_ = continuous && degree_ == 1 &&
                     std::all_of(slopes_.begin(), slopes_.end(), [](double s) { return s > 0.0; });
}

PiecewiseAffineMap PiecewiseAffineMap::rotation(double rho) {
    return PiecewiseAffineMap({0.0}, {1.0}, {rho});
}

PiecewiseAffineMap PiecewiseAffineMap::from_json(const nlohmann::json& j) {
    return PiecewiseAffineMap(j.at("breakpoints").get<std::vector<double>>(),
                              j.at("slopes").get<std::vector<double>>(),
                              j.at("offsets").get<std::vector<double>>());
}

nlohmann::json PiecewiseAffineMap::to_json() const {
    return {{"breakpoints", breakpoints_}, {"slopes", slopes_}, {"offsets", offsets_}};
}

std::size_t PiecewiseAffineMap::piece_index(double x) const {
    const double u = wrap01(x);
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), u);
    return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double PiecewiseAffineMap::lift(double x) const {
    const double fl = std::floor(x);
    const double u = x - fl;
    const std::size_t p = piece_index(u);
    return degree_ * fl + (slopes_[p] * u + offsets_[p]);
}

bool PiecewiseAffineMap::at_kink(double x) const {
    const double u = wrap01(x);
    for (double k : kinks_) {
        const double d = std::abs(u - k);
        if (std::min(d, 1.0 - d) <= kKinkTol) return true;
    }
    return false;
}

bool PiecewiseAffineMap::kink_inside(const Arc& a) const {
    for (double k : kinks_) {
        const double first = k + std::floor(a.lo - k) + 1.0;  // least lift of k above a.lo
        if (first < a.hi) return true;
    }
    return false;
}

double PiecewiseAffineMap::inverse_lift(double y) const {
    if (!homeomorphism_) throw Error("inverse requires a circle homeomorphism");
    const double y0 = offsets_[0];
    const double n = std::floor(y - y0);
    const double r = y - n;
    std::size_t p = 0;
    for (std::size_t i = 1; i < slopes_.size(); ++i)
        if (r >= slopes_[i] * breakpoints_[i] + offsets_[i]) p = i;
    return (r - offsets_[p]) / slopes_[p] + n;
}

Arc PiecewiseAffineMap::image(const Arc& a) const {
    if (!homeomorphism_) throw Error("image requires a circle homeomorphism");
    return {lift(a.lo), lift(a.hi)};
}

Arc PiecewiseAffineMap::preimage(const Arc& a) const { return {inverse_lift(a.lo), inverse_lift(a.hi)}; }

double PiecewiseAffineMap::min_abs_slope() const {
    double v = std::abs(slopes_[0]);
    for (double s : slopes_) v = std::min(v, std::abs(s));
    return v;
}

double PiecewiseAffineMap::max_abs_slope() const {
    double v = std::abs(slopes_[0]);
    for (double s : slopes_) v = std::max(v, std::abs(s));
    return v;
}

kernels::PiecewiseTable PiecewiseAffineMap::table() const {
    return {breakpoints_, slopes_, offsets_, log_slopes_, degree_};
}

SineModulatedMap::SineModulatedMap(double base_slope, double amplitude, double offset)
    : base_(base_slope), amp_(amplitude), offset_(offset) {
    if (!(std::abs(amp_) < std::abs(base_))) throw Error("amplitude must be below the base slope");
}

double SineModulatedMap::lift(double x) const {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return base_ * x + amp_ / two_pi * (1.0 - std::cos(two_pi * x)) + offset_;
}

double SineModulatedMap::derivative(double x) const {
    return base_ + amp_ * std::sin(2.0 * std::numbers::pi * x);
}

double iterate(const PiecewiseAffineMap& f, double x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x = f(x);
    return x;
}

CocycleProduct cocycle(std::span<const PiecewiseAffineMap> maps, const Word& word, double x) {
    if (word.empty()) throw Error("empty word");
    if (maps.size() < word.alphabet()) throw Error("one fiber map per symbol required");
    CocycleProduct out{word, x, {}};
    out.partial_logs.reserve(word.length() + 1);
    out.partial_logs.push_back(0.0);
    double acc = 0.0;
    for (Symbol s : word.symbols()) {
        const PiecewiseAffineMap& f = maps[s];
        if (f.at_kink(x)) throw Error("ambiguous derivative");
        acc += std::log(std::abs(f.derivative(x)));
        out.partial_logs.push_back(acc);
        x = f(x);
    }
    return out;
}

namespace {

template <class Deriv>
double sampled_modulus(Deriv&& df, double delta, std::size_t grid, std::size_t offsets) {
    double worst = 0.0;
    for (std::size_t g = 0; g < grid; ++g) {
        const double c = static_cast<double>(g) / static_cast<double>(grid);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t k = 0; k <= offsets; ++k) {
            const double x = c - delta + 2.0 * delta * static_cast<double>(k) / static_cast<double>(offsets);
            const double v = std::log(std::abs(df(x)));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

std::vector<double> sample_points(const Arc& interval, std::size_t samples) {
    if (samples < 2) throw Error("distortion meter needs at least two samples");
    std::vector<double> x(samples);
    for (std::size_t i = 0; i < samples; ++i)
        x[i] = interval.lo + interval.width() * static_cast<double>(i) / static_cast<double>(samples - 1);
    return x;
}

DistortionReport blank_report(const Arc& interval, std::size_t m) {
    DistortionReport r;
    r.interval = interval;
    r.horizon = m;
    r.max_log_dist.assign(m + 1, 0.0);
    r.flagged.assign(m + 1, false);
    return r;
}

}  // namespace

double modulus_of_continuity(const SineModulatedMap& f, double delta, std::size_t grid, std::size_t offsets) {
    return sampled_modulus([&](double x) { return f.derivative(x); }, delta, grid, offsets);
}

double modulus_of_continuity(const PiecewiseAffineMap& f, double delta, std::size_t grid,
                             std::size_t offsets) {
    return sampled_modulus([&](double x) { return f.derivative(x); }, delta, grid, offsets);
}

DistortionReport distortion_meter(const PiecewiseAffineMap& f, const Arc& interval, std::size_t m,
                                  std::size_t samples) {
    DistortionReport r = blank_report(interval, m);
    std::vector<double> x = sample_points(interval, samples);
    std::vector<double> acc(samples, 0.0);
    const kernels::PiecewiseTable t = f.table();
    for (std::size_t l = 1; l <= m; ++l) {
        const auto [lo, hi] = kernels::minmax(x);
        r.flagged[l] = r.flagged[l - 1] || f.kink_inside(Arc{lo, hi});
        kernels::piecewise_lift_step(t, x, acc);
        const auto [a, b] = kernels::minmax(acc);
        r.max_log_dist[l] = b - a;
    }
    for (double d = interval.width(); r.modulus.size() < 4; d *= 0.5)
        r.modulus.emplace_back(d, modulus_of_continuity(f, d));
    return r;
}

DistortionReport distortion_meter(const SineModulatedMap& f, const Arc& interval, std::size_t m,
                                  std::size_t samples) {
    DistortionReport r = blank_report(interval, m);
    std::vector<double> x = sample_points(interval, samples);
    std::vector<double> acc(samples, 0.0);
    for (std::size_t l = 1; l <= m; ++l) {
        for (std::size_t i = 0; i < samples; ++i) {
            acc[i] += std::log(std::abs(f.derivative(x[i])));
            x[i] = f.lift(x[i]);
        }
        const auto [a, b] = kernels::minmax(acc);
        r.max_log_dist[l] = b - a;
    }
    for (double d = interval.width(); r.modulus.size() < 4; d *= 0.5)
        r.modulus.emplace_back(d, modulus_of_continuity(f, d));
    return r;
}

double distortion_radius(double delta0, double K, double eps, double eps_D, std::size_t m) {
    if (!(delta0 > 0.0) || !(K >= 1.0)) throw Error("distortion radius needs delta0 > 0 and K >= 1");
    return delta0 / K * std::exp(-static_cast<double>(m) * (eps + eps_D));
}

}  // namespace blendlab
