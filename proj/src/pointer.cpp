#include "tsvf/pointer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace tsvf {

namespace {

constexpr double kMassTolerance = 1e-9;

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double grid_total(const PointerMixture& mix, std::vector<double>& cdf) {
    const double w = mix.half_width();
    const double h = mix.step();
    const auto nodes = static_cast<std::size_t>(std::floor(2.0 * w / h)) + 1;
    cdf.assign(nodes, 0.0);
    double prev = mix.density(-w);
    for (std::size_t i = 1; i < nodes; ++i) {
        const double x = -w + h * static_cast<double>(i);
        const double d = mix.density(x);
        cdf[i] = cdf[i - 1] + 0.5 * (prev + d) * h;
        prev = d;
    }
    return cdf.back();
}

} // namespace

double uniform01(std::uint64_t seed, std::uint64_t index) {
    // Counter-based stream: a few splitmix64 rounds keyed by (seed, index).
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    splitmix64(s);
    const std::uint64_t bits = splitmix64(s);
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

PointerMixture::PointerMixture(std::vector<PointerComponent> components, double sigma,
                               double half_width, double step)
    : components_(std::move(components)), sigma_(sigma), half_width_(half_width), step_(step) {
    if (sigma_ <= 0.0) {
        throw NumericError("PointerMixture: sigma must be positive");
    }
    if (step_ <= 0.0 || step_ >= sigma_ / 10.0) {
        throw NumericError("PointerMixture: grid step must be positive and below sigma/10");
    }
    if (half_width_ < 8.0 * sigma_) {
        throw NumericError("PointerMixture: grid half-width must be at least 8*sigma");
    }
    bool any = false;
    for (const auto& c : components_) {
        if (std::abs(c.amplitude) > 0.0) {
            any = true;
        }
    }
    if (!any) {
        throw NumericError("PointerMixture: all component amplitudes vanish");
    }
}

double PointerMixture::density(double x) const {
    // phi(x) = (2 pi sigma^2)^{-1/4} exp(-x^2 / (4 sigma^2)), so |phi|^2 is
    // the normal density with standard deviation sigma.
    const double norm = std::pow(2.0 * std::numbers::pi * sigma_ * sigma_, -0.25);
    cplx psi = 0.0;
    for (const auto& c : components_) {
        const double u = x - c.shift;
        psi += c.amplitude * norm * std::exp(-u * u / (4.0 * sigma_ * sigma_));
    }
    return std::norm(psi);
}

double PointerMixture::post_selection_weight() const {
    // Overlap of unit-normalized Gaussians at shifts s,t is
    // exp(-(s-t)^2 / (8 sigma^2)).
    double total = 0.0;
    for (const auto& a : components_) {
        for (const auto& b : components_) {
            const double d = a.shift - b.shift;
            total += (std::conj(a.amplitude) * b.amplitude).real() *
                     std::exp(-d * d / (8.0 * sigma_ * sigma_));
        }
    }
    return total;
}

double PointerMixture::mean() const {
    const double h = step_;
    double mass = 0.0;
    double first = 0.0;
    const auto nodes = static_cast<std::size_t>(std::floor(2.0 * half_width_ / h)) + 1;
    for (std::size_t i = 0; i < nodes; ++i) {
        const double x = -half_width_ + h * static_cast<double>(i);
        const double d = density(x);
        const double w = (i == 0 || i + 1 == nodes) ? 0.5 : 1.0;
        mass += w * d;
        first += w * d * x;
    }
    if (mass <= 0.0) {
        throw NumericError("PointerMixture::mean: zero probability mass on the grid");
    }
    return first / mass;
}

PointerMixture couple(const TwoState& ts, const LinearOp& a, const GaussianPointer& p) {
    if (!is_hermitian(a)) {
        throw NumericError("couple: pointer coupling requires a Hermitian observable");
    }
    if (p.sigma <= 0.0) {
        throw NumericError("couple: pointer width must be positive");
    }
    const auto spec = spectral_decompose(a);

    double max_abs_eig = 0.0;
    for (const double e : spec.eigenvalues) {
        max_abs_eig = std::max(max_abs_eig, std::abs(e));
    }
    const double min_width = std::max(8.0 * p.sigma,
                                      std::abs(p.coupling) * max_abs_eig + 8.0 * p.sigma);
    const double half_width =
        p.half_width > 0.0 ? p.half_width
                           : 12.0 * p.sigma + std::abs(p.coupling) * max_abs_eig;
    if (half_width < min_width) {
        throw NumericError("couple: grid half-width too small for the eigenvalue shifts");
    }
    const double step = p.step > 0.0 ? p.step : p.sigma / 200.0;

    std::vector<PointerComponent> components;
    double max_amp = 0.0;
    for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
        const cplx amp = inner(ts.post(), apply(spec.projectors[j], ts.pre()));
        components.push_back({p.coupling * spec.eigenvalues[j], amp});
        max_amp = std::max(max_amp, std::abs(amp));
    }
    if (max_amp == 0.0) {
        throw NumericError("couple: all spectral amplitudes vanish");
    }
    // Negligible components contribute nothing but widen the grid; drop them.
    std::erase_if(components,
                  [&](const PointerComponent& c) { return std::abs(c.amplitude) < 1e-13 * max_amp; });
    return PointerMixture(std::move(components), p.sigma, half_width, step);
}

MeasurementRecord sample(const PointerMixture& mix, std::size_t n, std::uint64_t seed) {
    MeasurementRecord rec;
    rec.requested_samples = n;
    rec.seed = seed;
    rec.post_selection_weight = mix.post_selection_weight();
    rec.sigma = mix.sigma();

    std::vector<double> cdf;
    const double total = grid_total(mix, cdf);
    if (!(total > 0.0) ||
        std::abs(total - rec.post_selection_weight) > kMassTolerance * rec.post_selection_weight) {
        throw NumericError("sample: grid captures less than 1 - 1e-9 of the probability mass; "
                           "widen or refine the grid");
    }

    rec.readings.reserve(n);
    const double w = mix.half_width();
    const double h = mix.step();
    for (std::size_t i = 0; i < n; ++i) {
        const double target = uniform01(seed, i) * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        const auto hi = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()),
                                              cdf.size() - 1);
        const std::size_t lo = hi - 1;
        const double span = cdf[hi] - cdf[lo];
        const double frac = span > 0.0 ? (target - cdf[lo]) / span : 0.5;
        rec.readings.push_back(-w + h * (static_cast<double>(lo) + frac));
    }
    return rec;
}

WeakValueEstimate estimate_real_weak_value(const MeasurementRecord& rec, double g) {
    if (g == 0.0) {
        throw NumericError("estimate_real_weak_value: zero coupling");
    }
    if (rec.readings.empty()) {
        throw NumericError("estimate_real_weak_value: empty measurement record");
    }
    const auto n = static_cast<double>(rec.readings.size());
    double mean = 0.0;
    for (const double x : rec.readings) {
        mean += x;
    }
    mean /= n;
    double var = 0.0;
    for (const double x : rec.readings) {
        var += (x - mean) * (x - mean);
    }
    var = rec.readings.size() > 1 ? var / (n - 1.0) : 0.0;
    return {mean / g, std::sqrt(var) / (std::abs(g) * std::sqrt(n))};
}

std::vector<BiasPoint> bias_scan(const TwoState& ts, const LinearOp& a,
                                 const GaussianPointer& base, std::span<const double> g_list,
                                 std::size_t n_per_g, std::uint64_t seed) {
    if (g_list.empty()) {
        throw NumericError("bias_scan: empty coupling list");
    }
    for (std::size_t i = 0; i < g_list.size(); ++i) {
        if (g_list[i] <= 0.0 || (i > 0 && g_list[i] >= g_list[i - 1])) {
            throw NumericError("bias_scan: couplings must be positive and strictly decreasing");
        }
    }
    std::vector<BiasPoint> out;
    out.reserve(g_list.size());
    for (std::size_t i = 0; i < g_list.size(); ++i) {
        GaussianPointer p = base;
        p.coupling = g_list[i];
        const PointerMixture mix = couple(ts, a, p);
        if (n_per_g == 0) {
            out.push_back({g_list[i], mix.mean() / g_list[i], 0.0});
        } else {
            const auto rec = sample(mix, n_per_g, seed + i);
            const auto est = estimate_real_weak_value(rec, g_list[i]);
            out.push_back({g_list[i], est.estimate, est.std_error});
        }
    }
    return out;
}

void write_record_csv(std::ostream& os, const MeasurementRecord& rec) {
    char buf[64];
    os << "# seed=" << rec.seed;
    std::snprintf(buf, sizeof buf, "%.17g", rec.coupling);
    os << " g=" << buf;
    std::snprintf(buf, sizeof buf, "%.17g", rec.sigma);
    os << " sigma=" << buf;
    os << " scenario=" << (rec.scenario_id.empty() ? "-" : rec.scenario_id);
    std::snprintf(buf, sizeof buf, "%.17g", rec.post_selection_weight);
    os << " weight=" << buf << "\n";
    os << "reading\n";
    for (const double x : rec.readings) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        os << buf << "\n";
    }
}

} // namespace tsvf
