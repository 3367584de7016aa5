#include "tsvf/hierarchy.hpp"

#include <algorithm>
#include <cmath>

namespace tsvf {

namespace {

// Enumerate k-subsets of `pool` in lexicographic order, invoking fn(subset).
template <typename Fn>
void for_each_subset(const std::vector<std::size_t>& pool, std::size_t k, Fn&& fn) {
    std::vector<std::size_t> idx(k);
    std::vector<std::size_t> subset(k);
    // Standard odometer over combinations.
    for (std::size_t i = 0; i < k; ++i) {
        idx[i] = i;
    }
    if (k > pool.size()) {
        return;
    }
    while (true) {
        for (std::size_t i = 0; i < k; ++i) {
            subset[i] = pool[idx[i]];
        }
        fn(subset);
        std::size_t i = k;
        while (i-- > 0) {
            if (idx[i] != i + pool.size() - k) {
                ++idx[i];
                for (std::size_t j = i + 1; j < k; ++j) {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if (i == 0) {
                return;
            }
        }
        if (k == 0) {
            return;
        }
    }
}

// Cartesian product over per-position label choices, lexicographic.
template <typename Fn>
void for_each_combo(const std::vector<std::vector<std::string>>& choices, Fn&& fn) {
    std::vector<std::size_t> pick(choices.size(), 0);
    std::vector<std::string> combo(choices.size());
    while (true) {
        for (std::size_t i = 0; i < choices.size(); ++i) {
            combo[i] = choices[i][pick[i]];
        }
        fn(combo);
        std::size_t i = choices.size();
        while (i-- > 0) {
            if (++pick[i] < choices[i].size()) {
                break;
            }
            pick[i] = 0;
            if (i == 0) {
                return;
            }
        }
        if (choices.empty()) {
            return;
        }
    }
}

std::vector<std::string> filtered_labels(const ProjectorFamily& family, std::size_t site,
                                         const std::optional<std::set<std::string>>& filter) {
    std::vector<std::string> out;
    for (const auto& label : family.labels(site)) {
        if (!filter || filter->count(label) > 0) {
            out.push_back(label);
        }
    }
    return out;
}

CorrelationTable enumerate_over_sites(const TwoState& ts, const ProjectorFamily& family,
                                      const std::vector<std::size_t>& sites,
                                      std::size_t max_order,
                                      const std::optional<std::set<std::string>>& label_filter) {
    require_same_space(ts.space(), family.space(), "enumerate");
    if (max_order > sites.size()) {
        throw DimensionError("enumerate: max_order exceeds the number of enumerated sites");
    }
    CorrelationTable table;
    table.active_sites = sites;
    table.max_order = max_order;
    table.two_state_id = ts.id();
    table.family_id = family.id();
    for (const std::size_t s : sites) {
        table.site_labels.push_back(filtered_labels(family, s, label_filter));
        if (table.site_labels.back().empty()) {
            throw DimensionError("enumerate: label filter leaves site " + std::to_string(s) +
                                 " with no projectors");
        }
    }

    for (std::size_t m = 0; m <= max_order; ++m) {
        for_each_subset(sites, m, [&](const std::vector<std::size_t>& subset) {
            std::vector<std::vector<std::string>> choices;
            choices.reserve(subset.size());
            for (const std::size_t s : subset) {
                const auto it = std::find(sites.begin(), sites.end(), s);
                choices.push_back(table.site_labels[static_cast<std::size_t>(it - sites.begin())]);
            }
            for_each_combo(choices, [&](const std::vector<std::string>& combo) {
                CorrelationQuery query;
                Ket v = ts.pre();
                for (std::size_t i = 0; i < subset.size(); ++i) {
                    query.assignment.emplace(subset[i], combo[i]);
                    v = apply_local(family.projector(subset[i], combo[i]), subset[i], v);
                }
                table.entries.emplace(std::move(query),
                                      weak_ratio(inner(ts.post(), v), ts.overlap()));
            });
        });
    }
    return table;
}

} // namespace

// ---------------------------------------------------------------------------
// ProjectorFamily
// ---------------------------------------------------------------------------

ProjectorFamily::ProjectorFamily(SpacePtr space, std::vector<SiteProjectors> per_site,
                                 std::string id)
    : space_(std::move(space)), per_site_(std::move(per_site)), id_(std::move(id)) {
    if (!space_ || per_site_.size() != space_->site_count()) {
        throw DimensionError("ProjectorFamily: one projector list per site required");
    }
    for (std::size_t s = 0; s < per_site_.size(); ++s) {
        const auto d = static_cast<Eigen::Index>(space_->site(s).dimension());
        const auto& projs = per_site_[s];
        if (projs.empty()) {
            throw DimensionError("ProjectorFamily: site " + std::to_string(s) +
                                 " has no projectors");
        }
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d, d);
        for (std::size_t i = 0; i < projs.size(); ++i) {
            const auto& [label, p] = projs[i];
            if (p.rows() != d || p.cols() != d) {
                throw DimensionError("ProjectorFamily: projector '" + label + "' at site " +
                                     std::to_string(s) + " has wrong dimension");
            }
            if ((p - p.adjoint()).cwiseAbs().maxCoeff() > kValidationTolerance ||
                (p * p - p).cwiseAbs().maxCoeff() > kValidationTolerance) {
                throw NumericError("ProjectorFamily: '" + label + "' at site " +
                                   std::to_string(s) + " is not a Hermitian projector");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if ((p * projs[j].second).cwiseAbs().maxCoeff() > kValidationTolerance) {
                    throw NumericError("ProjectorFamily: projectors '" + label + "' and '" +
                                       projs[j].first + "' at site " + std::to_string(s) +
                                       " are not mutually orthogonal");
                }
            }
            sum += p;
        }
        if ((sum - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() >
            kValidationTolerance) {
            throw NumericError("ProjectorFamily: projectors at site " + std::to_string(s) +
                               " do not sum to the local identity");
        }
    }
}

std::vector<std::string> ProjectorFamily::labels(std::size_t site) const {
    std::vector<std::string> out;
    for (const auto& [label, p] : per_site_.at(site)) {
        out.push_back(label);
    }
    return out;
}

const Eigen::MatrixXcd& ProjectorFamily::projector(std::size_t site,
                                                   const std::string& label) const {
    for (const auto& [l, p] : per_site_.at(site)) {
        if (l == label) {
            return p;
        }
    }
    throw DimensionError("ProjectorFamily: no projector labeled '" + label + "' at site " +
                         std::to_string(site));
}

bool ProjectorFamily::has_label(std::size_t site, const std::string& label) const {
    for (const auto& [l, p] : per_site_.at(site)) {
        if (l == label) {
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// CorrelationQuery / CorrelationTable
// ---------------------------------------------------------------------------

std::string CorrelationQuery::describe() const {
    if (assignment.empty()) {
        return "<identity>";
    }
    std::string out;
    for (const auto& [site, label] : assignment) {
        if (!out.empty()) {
            out += '*';
        }
        out += label + std::to_string(site + 1);
    }
    return out;
}

bool CorrelationQuery::operator<(const CorrelationQuery& other) const {
    if (assignment.size() != other.assignment.size()) {
        return assignment.size() < other.assignment.size();
    }
    return assignment < other.assignment;
}

const cplx& CorrelationTable::at(const CorrelationQuery& q) const {
    const auto it = entries.find(q);
    if (it == entries.end()) {
        throw DimensionError("CorrelationTable: missing entry " + q.describe());
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

CorrelationTable enumerate_correlations(const TwoState& ts, const ProjectorFamily& family,
                                        std::size_t max_order,
                                        const std::optional<std::set<std::string>>& label_filter) {
    std::vector<std::size_t> sites(family.site_count());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        sites[i] = i;
    }
    return enumerate_over_sites(ts, family, sites, max_order, label_filter);
}

HierarchyReport detect_hierarchy(const CorrelationTable& table, double zero_tolerance) {
    // Re-enumerate the expected key set from metadata and fail loudly on gaps.
    std::vector<std::string> missing;
    std::map<std::size_t, bool> order_vanishes;
    for (std::size_t m = 1; m <= table.max_order; ++m) {
        order_vanishes[m] = true;
    }
    for (std::size_t m = 1; m <= table.max_order; ++m) {
        for_each_subset(table.active_sites, m, [&](const std::vector<std::size_t>& subset) {
            std::vector<std::vector<std::string>> choices;
            for (const std::size_t s : subset) {
                const auto it =
                    std::find(table.active_sites.begin(), table.active_sites.end(), s);
                choices.push_back(
                    table.site_labels[static_cast<std::size_t>(it - table.active_sites.begin())]);
            }
            for_each_combo(choices, [&](const std::vector<std::string>& combo) {
                CorrelationQuery query;
                for (std::size_t i = 0; i < subset.size(); ++i) {
                    query.assignment.emplace(subset[i], combo[i]);
                }
                const auto it = table.entries.find(query);
                if (it == table.entries.end()) {
                    if (missing.size() < 8) {
                        missing.push_back(query.describe());
                    } else if (missing.size() == 8) {
                        missing.push_back("...");
                    }
                } else if (std::abs(it->second) >= zero_tolerance) {
                    order_vanishes[m] = false;
                }
            });
        });
    }
    if (!missing.empty()) {
        std::string names;
        for (const auto& name : missing) {
            names += (names.empty() ? "" : ", ") + name;
        }
        throw NumericError("detect_hierarchy: table is incomplete; missing queries: " + names);
    }

    HierarchyReport report;
    report.zero_tolerance = zero_tolerance;
    for (const auto& [order, vanishes] : order_vanishes) {
        if (vanishes) {
            report.vanishing_orders.insert(order);
        } else if (!report.emergence_order) {
            report.emergence_order = order;
        }
    }
    if (report.emergence_order) {
        for (const auto& [query, value] : table.entries) {
            if (query.order() == *report.emergence_order) {
                report.max_magnitude_at_emergence =
                    std::max(report.max_magnitude_at_emergence, std::abs(value));
            }
        }
    }
    return report;
}

CorrelationTable marginalize(const CorrelationTable& table, const ProjectorFamily& family) {
    if (table.max_order == 0) {
        throw DimensionError("marginalize: nothing below order 0");
    }
    const std::size_t m = table.max_order;
    // The identity resolution needs every label of the dropped site, so the
    // table must have been enumerated over the family's full label sets.
    for (std::size_t i = 0; i < table.active_sites.size(); ++i) {
        const auto full = family.labels(table.active_sites[i]);
        if (std::set<std::string>(full.begin(), full.end()) !=
            std::set<std::string>(table.site_labels[i].begin(), table.site_labels[i].end())) {
            throw NumericError("marginalize: table labels at site " +
                               std::to_string(table.active_sites[i]) +
                               " do not cover the family's full label set");
        }
    }

    CorrelationTable out;
    out.active_sites = table.active_sites;
    out.site_labels = table.site_labels;
    out.max_order = m - 1;
    out.two_state_id = table.two_state_id;
    out.family_id = table.family_id;

    for_each_subset(table.active_sites, m - 1, [&](const std::vector<std::size_t>& subset) {
        // Drop site: smallest active site not in the subset.
        std::size_t dropped = 0;
        bool found = false;
        for (const std::size_t s : table.active_sites) {
            if (std::find(subset.begin(), subset.end(), s) == subset.end()) {
                dropped = s;
                found = true;
                break;
            }
        }
        if (!found) {
            throw DimensionError("marginalize: no droppable site");
        }
        std::vector<std::vector<std::string>> choices;
        for (const std::size_t s : subset) {
            const auto it = std::find(table.active_sites.begin(), table.active_sites.end(), s);
            choices.push_back(
                table.site_labels[static_cast<std::size_t>(it - table.active_sites.begin())]);
        }
        for_each_combo(choices, [&](const std::vector<std::string>& combo) {
            CorrelationQuery reduced;
            for (std::size_t i = 0; i < subset.size(); ++i) {
                reduced.assignment.emplace(subset[i], combo[i]);
            }
            cplx sum = 0.0;
            for (const auto& label : family.labels(dropped)) {
                CorrelationQuery full = reduced;
                full.assignment.emplace(dropped, label);
                const auto it = table.entries.find(full);
                if (it == table.entries.end()) {
                    throw NumericError("marginalize: missing order-" + std::to_string(m) +
                                       " entry " + full.describe());
                }
                sum += it->second;
            }
            out.entries.emplace(std::move(reduced), sum);
        });
    });
    return out;
}

RestrictedEnumeration restrict_sites(const TwoState& ts, const ProjectorFamily& family,
                                     const std::set<std::size_t>& kept_sites,
                                     const std::optional<std::set<std::string>>& label_filter,
                                     double zero_tolerance) {
    if (kept_sites.empty()) {
        throw DimensionError("restrict_sites: kept site set must be non-empty");
    }
    for (const std::size_t s : kept_sites) {
        if (s >= family.site_count()) {
            throw DimensionError("restrict_sites: site " + std::to_string(s) + " out of range");
        }
    }
    const std::vector<std::size_t> sites(kept_sites.begin(), kept_sites.end());
    RestrictedEnumeration out{
        enumerate_over_sites(ts, family, sites, sites.size(), label_filter), {}};
    out.report = detect_hierarchy(out.table, zero_tolerance);
    return out;
}

} // namespace tsvf
