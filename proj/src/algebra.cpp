#include "tsvf/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace tsvf {

namespace {

void require_finite(const Eigen::VectorXcd& v, const char* what) {
    if (!v.allFinite()) {
        throw NumericError(std::string(what) + ": non-finite amplitude");
    }
}

void require_finite(const Eigen::MatrixXcd& m, const char* what) {
    if (!m.allFinite()) {
        throw NumericError(std::string(what) + ": non-finite matrix entry");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// LocalSpace
// ---------------------------------------------------------------------------

LocalSpace::LocalSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) {
        throw DimensionError("LocalSpace: empty basis");
    }
    std::set<std::string> distinct(labels_.begin(), labels_.end());
    if (distinct.size() != labels_.size()) {
        throw DimensionError("LocalSpace: basis labels must be pairwise distinct");
    }
    for (const auto& l : labels_) {
        if (l.empty() || l.find(':') != std::string::npos || l.find_first_of(" \t\n") != std::string::npos) {
            throw DimensionError("LocalSpace: label '" + l + "' is empty or contains ':'/whitespace");
        }
    }
}

LocalSpace LocalSpace::with_labels(std::vector<std::string> labels) {
    return LocalSpace(std::move(labels));
}

LocalSpace LocalSpace::qubit() { return LocalSpace({"up", "dn"}); }

LocalSpace LocalSpace::boxes() { return LocalSpace({"L", "R"}); }

LocalSpace LocalSpace::fock_mode(std::size_t max_occupation) {
    std::vector<std::string> labels;
    labels.reserve(max_occupation + 1);
    for (std::size_t n = 0; n <= max_occupation; ++n) {
        labels.push_back(std::to_string(n));
    }
    return LocalSpace(std::move(labels));
}

std::size_t LocalSpace::index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        throw DimensionError("LocalSpace: unknown basis label '" + label + "'");
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

bool LocalSpace::is_fock() const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != std::to_string(i)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// ProductSpace
// ---------------------------------------------------------------------------

ProductSpace::ProductSpace(std::vector<LocalSpace> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) {
        throw DimensionError("ProductSpace: needs at least one site");
    }
    for (const auto& s : sites_) {
        if (total_dimension_ > kMaxTotalDimension / s.dimension()) {
            throw DimensionError("ProductSpace: total dimension exceeds dense cap 2^20");
        }
        total_dimension_ *= s.dimension();
    }
    strides_.assign(sites_.size(), 1);
    for (std::size_t i = sites_.size(); i-- > 1;) {
        strides_[i - 1] = strides_[i] * sites_[i].dimension();
    }
}

std::size_t ProductSpace::flat_index(std::span<const std::size_t> digits) const {
    if (digits.size() != sites_.size()) {
        throw DimensionError("ProductSpace::flat_index: one digit per site required");
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        if (digits[i] >= sites_[i].dimension()) {
            throw DimensionError("ProductSpace::flat_index: digit out of range");
        }
        flat += digits[i] * strides_[i];
    }
    return flat;
}

std::vector<std::size_t> ProductSpace::digits(std::size_t flat) const {
    if (flat >= total_dimension_) {
        throw DimensionError("ProductSpace::digits: index out of range");
    }
    std::vector<std::size_t> out(sites_.size());
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        out[i] = flat / strides_[i];
        flat %= strides_[i];
    }
    return out;
}

std::string ProductSpace::index_label(std::size_t flat) const {
    const auto d = digits(flat);
    std::string out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i > 0) {
            out += ':';
        }
        out += sites_[i].label(d[i]);
    }
    return out;
}

std::size_t ProductSpace::index_of_label(const std::string& label) const {
    std::vector<std::size_t> d;
    std::stringstream ss(label);
    std::string part;
    while (std::getline(ss, part, ':')) {
        d.push_back(0);
        const std::size_t site = d.size() - 1;
        if (site >= sites_.size()) {
            throw ParseError("index label '" + label + "' has more parts than sites");
        }
        try {
            d[site] = sites_[site].index_of(part);
        } catch (const DimensionError&) {
            throw ParseError("index label '" + label + "': unknown basis label '" + part +
                             "' at site " + std::to_string(site));
        }
    }
    if (d.size() != sites_.size()) {
        throw ParseError("index label '" + label + "' has fewer parts than sites");
    }
    return flat_index(d);
}

SpacePtr make_space(std::vector<LocalSpace> sites) {
    return std::make_shared<const ProductSpace>(std::move(sites));
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* what) {
    if (a == b) {
        return;
    }
    if (!a || !b || !(*a == *b)) {
        throw DimensionError(std::string(what) + ": operands live on different spaces");
    }
}

// ---------------------------------------------------------------------------
// Ket / LinearOp
// ---------------------------------------------------------------------------

Ket::Ket(SpacePtr space, Eigen::VectorXcd amplitudes)
    : space_(std::move(space)), amps_(std::move(amplitudes)) {
    if (!space_) {
        throw DimensionError("Ket: null space");
    }
    if (static_cast<std::size_t>(amps_.size()) != space_->total_dimension()) {
        throw DimensionError("Ket: amplitude vector length does not match space dimension");
    }
    require_finite(amps_, "Ket");
}

LinearOp::LinearOp(SpacePtr space, Eigen::MatrixXcd matrix)
    : space_(std::move(space)), mat_(std::move(matrix)) {
    if (!space_) {
        throw DimensionError("LinearOp: null space");
    }
    if (mat_.rows() != mat_.cols() ||
        static_cast<std::size_t>(mat_.rows()) != space_->total_dimension()) {
        throw DimensionError("LinearOp: matrix shape does not match space dimension");
    }
    require_finite(mat_, "LinearOp");
}

LinearOp LinearOp::identity(SpacePtr space) {
    const auto n = static_cast<Eigen::Index>(space->total_dimension());
    return LinearOp(std::move(space), Eigen::MatrixXcd::Identity(n, n));
}

LinearOp LinearOp::zero(SpacePtr space) {
    const auto n = static_cast<Eigen::Index>(space->total_dimension());
    return LinearOp(std::move(space), Eigen::MatrixXcd::Zero(n, n));
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

Ket tensor_ket(SpacePtr space, const std::vector<Eigen::VectorXcd>& factors) {
    if (factors.size() != space->site_count()) {
        throw DimensionError("tensor_ket: one factor per site required");
    }
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (static_cast<std::size_t>(factors[i].size()) != space->site(i).dimension()) {
            throw DimensionError("tensor_ket: factor " + std::to_string(i) +
                                 " does not match local dimension");
        }
    }
    // Site 0 most significant: amps[i] = prod_s factors[s][digit_s(i)].
    Eigen::VectorXcd amps = Eigen::VectorXcd::Ones(1);
    for (const auto& f : factors) {
        Eigen::VectorXcd next(amps.size() * f.size());
        for (Eigen::Index i = 0; i < amps.size(); ++i) {
            for (Eigen::Index j = 0; j < f.size(); ++j) {
                next(i * f.size() + j) = amps(i) * f(j);
            }
        }
        amps = std::move(next);
    }
    return Ket(std::move(space), std::move(amps));
}

LinearOp embed_local(const Eigen::MatrixXcd& local, std::size_t site, SpacePtr space) {
    std::map<std::size_t, Eigen::MatrixXcd> locals;
    locals.emplace(site, local);
    return embed_product(std::move(space), locals);
}

LinearOp embed_product(SpacePtr space, const std::map<std::size_t, Eigen::MatrixXcd>& locals) {
    for (const auto& [site, local] : locals) {
        if (site >= space->site_count()) {
            throw DimensionError("embed_product: site index out of range");
        }
        const auto d = static_cast<Eigen::Index>(space->site(site).dimension());
        if (local.rows() != d || local.cols() != d) {
            throw DimensionError("embed_product: local matrix does not match site dimension");
        }
    }
    // Iterative Kronecker product, site 0 most significant.
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
    for (std::size_t s = 0; s < space->site_count(); ++s) {
        const auto it = locals.find(s);
        const auto d = static_cast<Eigen::Index>(space->site(s).dimension());
        const Eigen::MatrixXcd factor =
            it != locals.end() ? it->second : Eigen::MatrixXcd::Identity(d, d);
        Eigen::MatrixXcd next(m.rows() * d, m.cols() * d);
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                next.block(r * d, c * d, d, d) = m(r, c) * factor;
            }
        }
        m = std::move(next);
    }
    return LinearOp(std::move(space), std::move(m));
}

Ket apply_local(const Eigen::MatrixXcd& local, std::size_t site, const Ket& ket) {
    const auto& space = *ket.space();
    if (site >= space.site_count()) {
        throw DimensionError("apply_local: site index out of range");
    }
    const std::size_t d = space.site(site).dimension();
    if (static_cast<std::size_t>(local.rows()) != d ||
        static_cast<std::size_t>(local.cols()) != d) {
        throw DimensionError("apply_local: local matrix does not match site dimension");
    }
    const std::size_t stride = space.stride(site);
    const std::size_t block = stride * d;
    const auto& in = ket.amps();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
    for (std::size_t base = 0; base < space.total_dimension(); base += block) {
        for (std::size_t off = 0; off < stride; ++off) {
            for (std::size_t r = 0; r < d; ++r) {
                cplx acc = 0.0;
                for (std::size_t c = 0; c < d; ++c) {
                    acc += local(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                           in(static_cast<Eigen::Index>(base + c * stride + off));
                }
                out(static_cast<Eigen::Index>(base + r * stride + off)) = acc;
            }
        }
    }
    return Ket(ket.space(), std::move(out));
}

LinearOp compose(const LinearOp& a, const LinearOp& b) {
    require_same_space(a.space(), b.space(), "compose");
    return LinearOp(a.space(), a.matrix() * b.matrix());
}

LinearOp add(const LinearOp& a, const LinearOp& b) {
    require_same_space(a.space(), b.space(), "add");
    return LinearOp(a.space(), a.matrix() + b.matrix());
}

LinearOp scale(cplx c, const LinearOp& a) {
    return LinearOp(a.space(), c * a.matrix());
}

LinearOp adjoint(const LinearOp& a) {
    return LinearOp(a.space(), a.matrix().adjoint());
}

cplx inner(const Ket& bra_of, const Ket& ket) {
    require_same_space(bra_of.space(), ket.space(), "inner");
    // Plain ascending-index sum, not a blocked reduction: the summation
    // order is fixed so results are reproducible, and integer-valued
    // amplitude cancellations stay exact.
    const auto& b = bra_of.amps();
    const auto& k = ket.amps();
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < k.size(); ++i) {
        acc += std::conj(b(i)) * k(i);
    }
    return acc;
}

cplx weak_ratio(cplx numerator, cplx denominator) {
    const double mag2 = std::norm(denominator);
    double re = (numerator.real() * denominator.real() +
                 numerator.imag() * denominator.imag()) /
                mag2;
    double im = (numerator.imag() * denominator.real() -
                 numerator.real() * denominator.imag()) /
                mag2;
    if (re == 0.0) {
        re = 0.0;
    }
    if (im == 0.0) {
        im = 0.0;
    }
    return {re, im};
}

Ket apply(const LinearOp& op, const Ket& ket) {
    require_same_space(op.space(), ket.space(), "apply");
    return Ket(ket.space(), op.matrix() * ket.amps());
}

LinearOp fock_annihilation(std::size_t mode, SpacePtr space) {
    if (mode >= space->site_count()) {
        throw DimensionError("fock_annihilation: mode index out of range");
    }
    const auto& local_space = space->site(mode);
    if (!local_space.is_fock() || local_space.dimension() < 2) {
        throw DimensionError("fock_annihilation: site " + std::to_string(mode) +
                             " is not a Fock mode with max occupation >= 1");
    }
    const auto d = static_cast<Eigen::Index>(local_space.dimension());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return embed_local(a, mode, std::move(space));
}

bool is_hermitian(const LinearOp& a, double tol) {
    const auto& m = a.matrix();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

} // namespace tsvf
