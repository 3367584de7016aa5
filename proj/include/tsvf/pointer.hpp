#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tsvf/twostate.hpp"

namespace tsvf {

/// Von Neumann Gaussian pointer: impulsive coupling of strength `coupling`
/// (g) to the measured observable, position readout of width `sigma`. The
/// sampling grid defaults to half_width = 12*sigma + g*max|eigenvalue| and
/// step = sigma/200; overrides must keep step < sigma/10 and
/// half_width >= max(8*sigma, g*max|eigenvalue| + 8*sigma).
struct GaussianPointer {
    double sigma = 1.0;
    double coupling = 0.0;
    double half_width = 0.0; // 0 = derive from defaults in couple()
    double step = 0.0;       // 0 = sigma/200
};

struct PointerComponent {
    double shift;   // g * eigenvalue
    cplx amplitude; // <Phi|Pi_j|Psi>
};

/// Superposition of shifted Gaussians: the (unnormalized) final pointer
/// wavefunction psi(x) = sum_j c_j phi(x - shift_j), phi a normalized
/// Gaussian of width sigma so that |phi|^2 has standard deviation sigma.
class PointerMixture {
  public:
    PointerMixture(std::vector<PointerComponent> components, double sigma, double half_width,
                   double step);

    const std::vector<PointerComponent>& components() const { return components_; }
    double sigma() const { return sigma_; }
    double half_width() const { return half_width_; }
    double step() const { return step_; }

    /// |psi(x)|^2, unnormalized.
    double density(double x) const;

    /// Integral of |psi|^2 over the whole line, in closed form. For
    /// normalized selections this tends to |<Phi|Psi>|^2 as g -> 0.
    double post_selection_weight() const;

    /// Mean of the normalized density, by grid integration.
    double mean() const;

  private:
    std::vector<PointerComponent> components_;
    double sigma_;
    double half_width_;
    double step_;
};

struct MeasurementRecord {
    std::vector<double> readings;
    std::size_t requested_samples = 0;
    std::uint64_t seed = 0;
    double post_selection_weight = 0.0;
    double coupling = 0.0;
    double sigma = 0.0;
    std::string scenario_id;
};

struct WeakValueEstimate {
    double estimate;
    double std_error;
};

struct BiasPoint {
    double coupling;
    double estimate;
    double std_error;
};

/// Spectral decomposition of a Hermitian observable, one mixture component
/// per distinct eigenvalue with amplitude <Phi|Pi_j|Psi> and shift
/// g * eigenvalue. Components with negligible amplitude are dropped.
PointerMixture couple(const TwoState& ts, const LinearOp& a, const GaussianPointer& p);

/// n independent draws from |psi|^2 via inverse-CDF on the grid. Each
/// reading is derived from a counter-based stream of (seed, index), so the
/// record is bit-identical regardless of how sampling is split across
/// workers. Throws NumericError if the grid misses more than 1e-9 of the
/// probability mass.
MeasurementRecord sample(const PointerMixture& mix, std::size_t n, std::uint64_t seed);

/// Pointer mean shift is g * Re<A>_w to first order in g:
/// estimate = mean / g, std_error = std / (|g| sqrt(n)).
WeakValueEstimate estimate_real_weak_value(const MeasurementRecord& rec, double g);

/// Sweep the coupling over a decreasing positive ladder. With n_per_g > 0,
/// estimates come from sampling; with n_per_g == 0 the exact grid-integrated
/// mean of the mixture is used (std_error 0), which is how the O(g^2) bias
/// of the weak-measurement limit is checked without statistical noise.
std::vector<BiasPoint> bias_scan(const TwoState& ts, const LinearOp& a,
                                 const GaussianPointer& base, std::span<const double> g_list,
                                 std::size_t n_per_g, std::uint64_t seed);

/// CSV: one reading per line after a comment header carrying seed, g, sigma,
/// scenario id and post-selection weight.
void write_record_csv(std::ostream& os, const MeasurementRecord& rec);

/// Counter-based uniform in [0,1): pure function of (seed, index).
double uniform01(std::uint64_t seed, std::uint64_t index);

} // namespace tsvf
