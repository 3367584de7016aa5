#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsvf/errors.hpp"

namespace tsvf {

using cplx = std::complex<double>;

/// One tensor factor: a finite local Hilbert space with named basis states.
class LocalSpace {
  public:
    static LocalSpace with_labels(std::vector<std::string> labels);
    /// Spin-1/2 site in the sigma_z basis, labels {up, dn}.
    static LocalSpace qubit();
    /// Two-box position site, labels {L, R}.
    static LocalSpace boxes();
    /// Bosonic mode truncated at the given occupation, labels {"0", "1", ...}.
    static LocalSpace fock_mode(std::size_t max_occupation);

    std::size_t dimension() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    std::size_t index_of(const std::string& label) const;

    /// True when the basis is an occupation basis "0","1",...,"d-1".
    bool is_fock() const;

    bool operator==(const LocalSpace& other) const { return labels_ == other.labels_; }

  private:
    explicit LocalSpace(std::vector<std::string> labels);
    std::vector<std::string> labels_;
};

/// Ordered tensor product of local spaces. Site 0 is the most significant
/// digit of the flattened index; this convention is fixed and scenario files
/// depend on it.
class ProductSpace {
  public:
    explicit ProductSpace(std::vector<LocalSpace> sites);

    std::size_t site_count() const { return sites_.size(); }
    const LocalSpace& site(std::size_t i) const { return sites_.at(i); }
    const std::vector<LocalSpace>& sites() const { return sites_; }
    std::size_t total_dimension() const { return total_dimension_; }

    /// Stride of site i in the flattened index (product of dimensions of
    /// all later sites).
    std::size_t stride(std::size_t i) const { return strides_.at(i); }

    std::size_t flat_index(std::span<const std::size_t> digits) const;
    std::vector<std::size_t> digits(std::size_t flat) const;

    /// Colon-joined basis labels for a flattened index, e.g. "L:R".
    std::string index_label(std::size_t flat) const;
    /// Inverse of index_label; throws ParseError on unknown labels.
    std::size_t index_of_label(const std::string& label) const;

    bool operator==(const ProductSpace& other) const { return sites_ == other.sites_; }

    /// Dense representation cap for kets; constructors refuse larger spaces.
    static constexpr std::size_t kMaxTotalDimension = std::size_t{1} << 20;

  private:
    std::vector<LocalSpace> sites_;
    std::vector<std::size_t> strides_;
    std::size_t total_dimension_ = 1;
};

using SpacePtr = std::shared_ptr<const ProductSpace>;

SpacePtr make_space(std::vector<LocalSpace> sites);

/// Throws DimensionError unless the two spaces are structurally equal.
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what);

/// Dense state vector over a ProductSpace. Not necessarily normalized:
/// weak values are scale invariant and nothing in this library rescales
/// amplitudes behind the caller's back.
class Ket {
  public:
    Ket(SpacePtr space, Eigen::VectorXcd amplitudes);

    const SpacePtr& space() const { return space_; }
    const Eigen::VectorXcd& amps() const { return amps_; }
    cplx amp(std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }
    std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
    double norm() const { return amps_.norm(); }

  private:
    SpacePtr space_;
    Eigen::VectorXcd amps_;
};

/// Dense operator over a ProductSpace. Hermiticity is a queryable property,
/// not an invariant: annihilation operators live here too.
class LinearOp {
  public:
    LinearOp(SpacePtr space, Eigen::MatrixXcd matrix);

    static LinearOp identity(SpacePtr space);
    static LinearOp zero(SpacePtr space);

    const SpacePtr& space() const { return space_; }
    const Eigen::MatrixXcd& matrix() const { return mat_; }
    std::size_t dimension() const { return static_cast<std::size_t>(mat_.rows()); }

  private:
    SpacePtr space_;
    Eigen::MatrixXcd mat_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Tensor product of per-site local kets, one factor per site in order.
/// The flattened result follows the site-0-most-significant convention.
Ket tensor_ket(SpacePtr space, const std::vector<Eigen::VectorXcd>& factors);

/// Embed a local operator at one site, identity everywhere else.
LinearOp embed_local(const Eigen::MatrixXcd& local, std::size_t site, SpacePtr space);

/// Embed a product of local operators acting on distinct sites (identity on
/// unlisted sites) without forming intermediate full-space products.
LinearOp embed_product(SpacePtr space, const std::map<std::size_t, Eigen::MatrixXcd>& locals);

/// Apply a local operator at one site directly to a ket; O(dim * local_dim),
/// never materializes the embedded matrix.
Ket apply_local(const Eigen::MatrixXcd& local, std::size_t site, const Ket& ket);

LinearOp compose(const LinearOp& a, const LinearOp& b);
LinearOp add(const LinearOp& a, const LinearOp& b);
LinearOp scale(cplx c, const LinearOp& a);
LinearOp adjoint(const LinearOp& a);

inline LinearOp operator*(const LinearOp& a, const LinearOp& b) { return compose(a, b); }
inline LinearOp operator+(const LinearOp& a, const LinearOp& b) { return add(a, b); }
inline LinearOp operator*(cplx c, const LinearOp& a) { return scale(c, a); }

/// <bra_of|ket>; conjugates the first argument's amplitudes.
cplx inner(const Ket& bra_of, const Ket& ket);

/// Quotient used for every weak value: conjugate-multiplication division
/// with zero components canonicalized to +0. Equal numerator and denominator
/// divide to exactly 1, and exactly-zero numerators stay exactly 0 -- the
/// crisp values the correlation hierarchy is built on. Magnitudes in this
/// domain are nowhere near the overflow range of the naive formula.
cplx weak_ratio(cplx numerator, cplx denominator);

Ket apply(const LinearOp& op, const Ket& ket);

/// Truncated ladder operator a|n> = sqrt(n)|n-1> on a Fock-mode site.
LinearOp fock_annihilation(std::size_t mode, SpacePtr space);

/// ||A - A^dagger||_max <= tol * max(1, ||A||_max).
bool is_hermitian(const LinearOp& a, double tol = 1e-12);

} // namespace tsvf
