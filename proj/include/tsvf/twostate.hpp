#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsvf/algebra.hpp"

namespace tsvf {

/// Pre- and post-selected pair over one space. `post` is stored as a ket;
/// its conjugate is the backward-evolving bra. The overlap <Phi|Psi> is
/// cached at construction and must clear the admissibility threshold:
/// exactly orthogonal selections are the forbidden limit.
class TwoState {
  public:
    TwoState(Ket pre, Ket post, std::string id = "");

    const Ket& pre() const { return pre_; }
    const Ket& post() const { return post_; }
    cplx overlap() const { return overlap_; }
    const std::string& id() const { return id_; }
    const SpacePtr& space() const { return pre_.space(); }

    double pre_norm() const { return pre_norm_; }
    double post_norm() const { return post_norm_; }

    /// Relative admissibility threshold: reject when
    /// |<Phi|Psi>| < kOverlapThreshold * ||Phi|| * ||Psi||.
    static constexpr double kOverlapThreshold = 1e-12;

  private:
    Ket pre_;
    Ket post_;
    cplx overlap_;
    double pre_norm_;
    double post_norm_;
    std::string id_;
};

/// Distinct eigenvalues (ascending) with their spectral projectors.
/// Projectors are Hermitian, idempotent, mutually orthogonal and sum to
/// the identity; eigenvalue clustering uses kClusterGap.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<LinearOp> projectors;

    static constexpr double kClusterGap = 1e-9;
};

/// Dense Hermitian eigendecomposition with eigenvalue clustering.
/// Throws NumericError for non-Hermitian input.
SpectralDecomposition spectral_decompose(const LinearOp& a,
                                         double cluster_gap = SpectralDecomposition::kClusterGap);

/// <Phi|A|Psi> / <Phi|Psi>. Works for non-Hermitian A (annihilation
/// products); the result must be finite.
cplx weak_value(const TwoState& ts, const LinearOp& a);

/// ABL rule for an intermediate projective measurement:
/// P(j) = |<Phi|Pi_j|Psi>|^2 / sum_k |<Phi|Pi_k|Psi>|^2.
std::vector<double> abl_probabilities(const TwoState& ts, const SpectralDecomposition& spec);

/// Forward direction of the dichotomic coincidence: if `a` has exactly two
/// distinct eigenvalues and its weak value matches one of them within
/// kMatchTolerance, the strong (ABL) outcome is that eigenvalue with
/// probability 1; returns it. Returns nothing when the weak value is not an
/// eigenvalue. Throws NumericError when `a` is not dichotomic.
std::optional<double> dichotomic_certainty(const TwoState& ts, const LinearOp& a);

inline constexpr double kDichotomicMatchTolerance = 1e-9;

/// Rescale pre and post by nonzero scalars; every weak value is unchanged.
TwoState scale(const TwoState& ts, cplx c_pre, cplx c_post);

} // namespace tsvf
