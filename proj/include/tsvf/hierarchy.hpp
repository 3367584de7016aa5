#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsvf/twostate.hpp"

namespace tsvf {

/// Per-site labeled local projectors. Within each site the projectors must
/// be idempotent, mutually orthogonal and sum to the local identity; that
/// completeness is what makes top-down marginalization an identity.
class ProjectorFamily {
  public:
    using SiteProjectors = std::vector<std::pair<std::string, Eigen::MatrixXcd>>;

    ProjectorFamily(SpacePtr space, std::vector<SiteProjectors> per_site, std::string id = "");

    const SpacePtr& space() const { return space_; }
    const std::string& id() const { return id_; }
    std::size_t site_count() const { return per_site_.size(); }
    std::vector<std::string> labels(std::size_t site) const;
    const Eigen::MatrixXcd& projector(std::size_t site, const std::string& label) const;
    bool has_label(std::size_t site, const std::string& label) const;

    static constexpr double kValidationTolerance = 1e-10;

  private:
    SpacePtr space_;
    std::vector<SiteProjectors> per_site_;
    std::string id_;
};

/// One m-point query: which sites carry which projector label. Unassigned
/// sites carry the identity (the b_i = 0 case).
struct CorrelationQuery {
    std::map<std::size_t, std::string> assignment;

    std::size_t order() const { return assignment.size(); }
    std::string describe() const;

    bool operator<(const CorrelationQuery& other) const;
    bool operator==(const CorrelationQuery& other) const { return assignment == other.assignment; }
};

/// Weak values of projector products, keyed by query, plus enough metadata
/// to re-enumerate the expected key set (completeness checks) and to
/// marginalize.
struct CorrelationTable {
    std::map<CorrelationQuery, cplx> entries;
    /// Sites that queries may assign (all sites unless restricted).
    std::vector<std::size_t> active_sites;
    /// Labels enumerated per active site, parallel to active_sites.
    std::vector<std::vector<std::string>> site_labels;
    std::size_t max_order = 0;
    std::string two_state_id;
    std::string family_id;

    const cplx& at(const CorrelationQuery& q) const;
};

/// Classification of a table by order: which orders vanish entirely, where
/// the first non-vanishing entry appears, and how large it is.
struct HierarchyReport {
    std::set<std::size_t> vanishing_orders;
    std::optional<std::size_t> emergence_order;
    double max_magnitude_at_emergence = 0.0;
    double zero_tolerance = 0.0;
};

inline constexpr double kZeroTolerance = 1e-10;

/// All site subsets up to max_order crossed with all (optionally filtered)
/// label combinations; each entry is the weak value of the corresponding
/// product of embedded projectors. Includes the order-0 entry (identity),
/// which is exactly 1.
CorrelationTable enumerate_correlations(const TwoState& ts, const ProjectorFamily& family,
                                        std::size_t max_order,
                                        const std::optional<std::set<std::string>>& label_filter =
                                            std::nullopt);

/// Classifies each order 1..max as vanishing iff every entry magnitude is
/// below zero_tolerance. Throws NumericError naming missing queries when the
/// table is not complete for its declared metadata.
HierarchyReport detect_hierarchy(const CorrelationTable& table,
                                 double zero_tolerance = kZeroTolerance);

/// Top-down step: each order-(m-1) entry is the sum of order-m entries over
/// the dropped site's labels. Requires the input table to be complete at its
/// top order over ALL labels of the family (identity resolution).
CorrelationTable marginalize(const CorrelationTable& table, const ProjectorFamily& family);

struct RestrictedEnumeration {
    CorrelationTable table;
    HierarchyReport report;
};

/// Enumeration over a subset of sites only; discarded sites always carry the
/// identity. The attached report states the emergence order as computed --
/// no claim about where correlations "should" emerge is asserted.
RestrictedEnumeration restrict_sites(const TwoState& ts, const ProjectorFamily& family,
                                     const std::set<std::size_t>& kept_sites,
                                     const std::optional<std::set<std::string>>& label_filter =
                                         std::nullopt,
                                     double zero_tolerance = kZeroTolerance);

} // namespace tsvf
