#include "tsvf/twostate.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace tsvf {

TwoState::TwoState(Ket pre, Ket post, std::string id)
    : pre_(std::move(pre)),
      post_(std::move(post)),
      overlap_(0.0),
      pre_norm_(0.0),
      post_norm_(0.0),
      id_(std::move(id)) {
    require_same_space(pre_.space(), post_.space(), "TwoState");
    overlap_ = inner(post_, pre_);
    pre_norm_ = pre_.norm();
    post_norm_ = post_.norm();
    if (pre_norm_ == 0.0 || post_norm_ == 0.0 ||
        std::abs(overlap_) < kOverlapThreshold * pre_norm_ * post_norm_) {
        throw OrthogonalError("TwoState: pre- and post-selected states are (numerically) "
                              "orthogonal; |<Phi|Psi>| = " +
                              std::to_string(std::abs(overlap_)));
    }
}

SpectralDecomposition spectral_decompose(const LinearOp& a, double cluster_gap) {
    if (!is_hermitian(a)) {
        throw NumericError("spectral_decompose: operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.matrix());
    if (solver.info() != Eigen::Success) {
        throw NumericError("spectral_decompose: eigensolver failed to converge");
    }
    const auto& evals = solver.eigenvalues();
    const auto& evecs = solver.eigenvectors();

    SpectralDecomposition out;
    const Eigen::Index n = evals.size();
    Eigen::Index start = 0;
    while (start < n) {
        // Eigenvalues come out ascending; absorb everything within the gap
        // tolerance of its neighbor into one cluster.
        Eigen::Index end = start + 1;
        while (end < n && evals(end) - evals(end - 1) < cluster_gap) {
            ++end;
        }
        Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(n, n);
        double value = 0.0;
        for (Eigen::Index k = start; k < end; ++k) {
            proj += evecs.col(k) * evecs.col(k).adjoint();
            value += evals(k);
        }
        out.eigenvalues.push_back(value / static_cast<double>(end - start));
        out.projectors.emplace_back(a.space(), std::move(proj));
        start = end;
    }
    return out;
}

cplx weak_value(const TwoState& ts, const LinearOp& a) {
    require_same_space(ts.space(), a.space(), "weak_value");
    if (std::abs(ts.overlap()) <
        TwoState::kOverlapThreshold * ts.pre_norm() * ts.post_norm()) {
        throw OrthogonalError("weak_value: two-state overlap below admissibility threshold");
    }
    const cplx numerator = inner(ts.post(), apply(a, ts.pre()));
    const cplx value = weak_ratio(numerator, ts.overlap());
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
        throw NumericError("weak_value: non-finite result");
    }
    return value;
}

std::vector<double> abl_probabilities(const TwoState& ts, const SpectralDecomposition& spec) {
    if (spec.projectors.empty() || spec.projectors.size() != spec.eigenvalues.size()) {
        throw NumericError("abl_probabilities: malformed spectral decomposition");
    }
    std::vector<double> weights;
    weights.reserve(spec.projectors.size());
    double total = 0.0;
    for (const auto& proj : spec.projectors) {
        const cplx amp = inner(ts.post(), apply(proj, ts.pre()));
        const double w = std::norm(amp);
        weights.push_back(w);
        total += w;
    }
    const double floor = std::norm(TwoState::kOverlapThreshold * ts.pre_norm() * ts.post_norm());
    if (total <= floor) {
        throw NumericError("abl_probabilities: all outcome amplitudes vanish; measurement is "
                           "incompatible with the pre- and post-selection");
    }
    for (auto& w : weights) {
        w /= total;
    }
    return weights;
}

std::optional<double> dichotomic_certainty(const TwoState& ts, const LinearOp& a) {
    const auto spec = spectral_decompose(a);
    if (spec.eigenvalues.size() != 2) {
        throw NumericError("dichotomic_certainty: operator has " +
                           std::to_string(spec.eigenvalues.size()) +
                           " distinct eigenvalues, need exactly 2");
    }
    const cplx wv = weak_value(ts, a);
    for (std::size_t j = 0; j < 2; ++j) {
        if (std::abs(wv - cplx(spec.eigenvalues[j], 0.0)) < kDichotomicMatchTolerance) {
            return spec.eigenvalues[j];
        }
    }
    return std::nullopt;
}

TwoState scale(const TwoState& ts, cplx c_pre, cplx c_post) {
    if (c_pre == cplx(0.0) || c_post == cplx(0.0)) {
        throw NumericError("scale: zero scalar would destroy the two-state");
    }
    return TwoState(Ket(ts.space(), c_pre * ts.pre().amps()),
                    Ket(ts.space(), c_post * ts.post().amps()), ts.id());
}

} // namespace tsvf
