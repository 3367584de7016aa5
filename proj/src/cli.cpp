#include "tsvf/cli.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsvf/hierarchy.hpp"
#include "tsvf/pointer.hpp"
#include "tsvf/scenarios.hpp"

namespace tsvf::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

// Flag misuse distinct from numeric/admissibility failures: exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

// Table rendering snaps sub-tolerance magnitudes to a crisp 0; csv/json
// always carry the raw values.
std::string format_complex_snapped(cplx z, double tol) {
    if (std::abs(z) < tol) {
        return "0";
    }
    return format_complex(z);
}

ordered_json complex_json(cplx z) {
    return ordered_json{{"re", z.real()}, {"im", z.imag()}};
}

// ---------------------------------------------------------------------------
// Scenario loading
// ---------------------------------------------------------------------------

struct ScenarioArgs {
    std::string name;
    std::optional<std::size_t> n;
    std::optional<std::string> c_text;
};

Scenario load_scenario(const ScenarioArgs& args) {
    if (args.name == "two-box") {
        return two_box();
    }
    if (args.name == "hydrogen") {
        return hydrogen();
    }
    if (args.name == "n-body") {
        if (!args.n) {
            throw UsageError("scenario n-body requires --n");
        }
        cplx c(1.0, 0.0);
        if (args.c_text) {
            try {
                c = parse_complex_literal(*args.c_text);
            } catch (const ParseError& e) {
                throw UsageError(e.what());
            }
        }
        return n_body(*args.n, c);
    }
    if (args.name == "photon") {
        if (!args.n) {
            throw UsageError("scenario photon requires --n");
        }
        return photon_polarization(*args.n);
    }
    if (args.name == "fock") {
        if (!args.n) {
            throw UsageError("scenario fock requires --n");
        }
        return fock_chain(*args.n);
    }
    std::ifstream file(args.name);
    if (!file) {
        throw UsageError("unknown scenario '" + args.name +
                         "': not a built-in id and no such file");
    }
    std::stringstream ss;
    ss << file.rdbuf();
    return parse_scenario(ss.str());
}

// ---------------------------------------------------------------------------
// Observable query mini-language: named observables, site-label products
// like "L1*L2", annihilation products like "a1*a3". Sites are 1-based.
// ---------------------------------------------------------------------------

std::string expand_full_alias(const Scenario& s, const std::string& query) {
    if (query.rfind("full-", 0) != 0) {
        return query;
    }
    const std::string label = query.substr(5);
    if (label.empty()) {
        return query;
    }
    std::string expanded;
    for (std::size_t i = 0; i < s.space->site_count(); ++i) {
        if (i > 0) {
            expanded += '*';
        }
        expanded += label + std::to_string(i + 1);
    }
    return expanded;
}

std::pair<std::size_t, Eigen::MatrixXcd> resolve_token(const Scenario& s,
                                                       const std::string& token) {
    std::size_t pos = token.size();
    while (pos > 0 && std::isdigit(static_cast<unsigned char>(token[pos - 1]))) {
        --pos;
    }
    if (pos == 0 || pos == token.size()) {
        throw UsageError("observable token '" + token + "' must be <label><site>");
    }
    const std::string label = token.substr(0, pos);
    const std::size_t site_1based = std::stoul(token.substr(pos));
    if (site_1based == 0 || site_1based > s.space->site_count()) {
        throw UsageError("site index out of range in observable token '" + token + "'");
    }
    const std::size_t site = site_1based - 1;

    if (label == "a") {
        const auto& local = s.space->site(site);
        if (!local.is_fock() || local.dimension() < 2) {
            throw UsageError("token '" + token + "' needs a Fock mode at site " +
                             std::to_string(site_1based));
        }
        const auto d = static_cast<Eigen::Index>(local.dimension());
        Eigen::MatrixXcd ladder = Eigen::MatrixXcd::Zero(d, d);
        for (Eigen::Index n = 1; n < d; ++n) {
            ladder(n - 1, n) = std::sqrt(static_cast<double>(n));
        }
        return {site, std::move(ladder)};
    }

    for (const auto& [fname, family] : s.families) {
        if (family.has_label(site, label)) {
            return {site, family.projector(site, label)};
        }
    }
    throw UsageError("no projector labeled '" + label + "' at site " +
                     std::to_string(site_1based));
}

using ObsProduct = std::vector<std::pair<std::size_t, Eigen::MatrixXcd>>;

ObsProduct parse_query(const Scenario& s, const std::string& query) {
    ObsProduct factors;
    std::stringstream ss(query);
    std::string token;
    while (std::getline(ss, token, '*')) {
        std::string clean;
        for (const char ch : token) {
            if (!std::isspace(static_cast<unsigned char>(ch))) {
                clean += ch;
            }
        }
        if (clean.empty()) {
            throw UsageError("empty factor in observable query '" + query + "'");
        }
        factors.push_back(resolve_token(s, clean));
    }
    if (factors.empty()) {
        throw UsageError("empty observable query");
    }
    return factors;
}

// Weak value of a product of local factors without materializing the
// full-space operator; rightmost factor acts first.
cplx weak_of_product(const TwoState& ts, const ObsProduct& factors) {
    Ket v = ts.pre();
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
        v = apply_local(it->second, it->first, v);
    }
    return weak_ratio(inner(ts.post(), v), ts.overlap());
}

cplx weak_of_query(const Scenario& s, const std::string& query) {
    const auto named = s.observables.find(query);
    if (named != s.observables.end()) {
        return weak_value(s.two_state, named->second);
    }
    return weak_of_product(s.two_state, parse_query(s, expand_full_alias(s, query)));
}

constexpr std::size_t kMaterializeMaxDim = 4096;

LinearOp materialize_query(const Scenario& s, const std::string& query) {
    const auto named = s.observables.find(query);
    if (named != s.observables.end()) {
        return named->second;
    }
    if (s.space->total_dimension() > kMaterializeMaxDim) {
        throw NumericError("observable '" + query + "' is too large to materialize (dim " +
                           std::to_string(s.space->total_dimension()) + ")");
    }
    const auto factors = parse_query(s, expand_full_alias(s, query));
    std::map<std::size_t, Eigen::MatrixXcd> by_site;
    bool distinct = true;
    for (const auto& [site, m] : factors) {
        if (!by_site.emplace(site, m).second) {
            distinct = false;
            break;
        }
    }
    if (distinct) {
        return embed_product(s.space, by_site);
    }
    LinearOp op = LinearOp::identity(s.space);
    for (const auto& [site, m] : factors) {
        op = compose(op, embed_local(m, site, s.space));
    }
    return op;
}

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        throw Error("cannot open output file '" + out_path + "'");
    }
    file << text;
}

struct CommonOpts {
    std::string format = "table";
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", opts.out_path, "Write output to this file instead of stdout");
}

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args) {
    cmd->add_option("scenario", args.name, "Built-in scenario id or scenario file path")
        ->required();
    cmd->add_option("--n", args.n, "Particle/mode count for n-body, photon, fock");
    cmd->add_option("--c", args.c_text, "Post-selection coefficient C for n-body (complex)");
}

std::string scenario_param_suffix(const Scenario& s) {
    std::string out;
    for (const auto& [name, value] : s.params) {
        out += " " + name + "=" + (value.imag() == 0.0 ? fmt12(value.real())
                                                       : format_complex(value));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

std::string render_list(const std::string& format) {
    struct Entry {
        const char* id;
        const char* params;
    };
    const std::vector<Entry> entries = {
        {"two-box", ""},
        {"hydrogen", ""},
        {"n-body", "--n <2..14> [--c <complex, default 1>]"},
        {"photon", "--n <1..12>"},
        {"fock", "--n <1..20>"},
    };
    if (format == "json") {
        ordered_json j = ordered_json::array();
        for (const auto& e : entries) {
            j.push_back({{"id", e.id}, {"params", e.params}});
        }
        return j.dump(2) + "\n";
    }
    if (format == "csv") {
        std::string out = "id,params\n";
        for (const auto& e : entries) {
            out += std::string(e.id) + "," + e.params + "\n";
        }
        return out;
    }
    std::string out;
    for (const auto& e : entries) {
        out += e.id;
        if (*e.params) {
            out += std::string("  ") + e.params;
        }
        out += "\n";
    }
    return out;
}

std::string render_weak(const Scenario& s, const std::vector<std::string>& queries,
                        const std::string& format) {
    std::vector<std::pair<std::string, cplx>> values;
    values.reserve(queries.size());
    for (const auto& q : queries) {
        values.emplace_back(q, weak_of_query(s, q));
    }
    if (format == "json") {
        ordered_json j;
        j["scenario"] = s.id;
        ordered_json arr = ordered_json::array();
        for (const auto& [q, v] : values) {
            arr.push_back({{"observable", q}, {"weak_value", complex_json(v)}});
        }
        j["weak_values"] = arr;
        return j.dump(2) + "\n";
    }
    if (format == "csv") {
        std::string out = "scenario,observable,re,im\n";
        for (const auto& [q, v] : values) {
            out += s.id + "," + q + "," + fmt17(v.real()) + "," + fmt17(v.imag()) + "\n";
        }
        return out;
    }
    std::string out = "scenario: " + s.id + scenario_param_suffix(s) + "\n";
    for (const auto& [q, v] : values) {
        out += q + " = " + format_complex_snapped(v, kZeroTolerance) + "\n";
    }
    return out;
}

std::string sites_column(const CorrelationQuery& q) {
    std::string out;
    for (const auto& [site, label] : q.assignment) {
        if (!out.empty()) {
            out += ':';
        }
        out += std::to_string(site + 1);
    }
    return out;
}

std::string labels_column(const CorrelationQuery& q) {
    std::string out;
    for (const auto& [site, label] : q.assignment) {
        if (!out.empty()) {
            out += ':';
        }
        out += label;
    }
    return out;
}

std::string render_hierarchy(const Scenario& s, const CorrelationTable& table,
                             const HierarchyReport& report, const std::string& format) {
    std::string vanishing;
    for (const std::size_t m : report.vanishing_orders) {
        vanishing += (vanishing.empty() ? "" : ";") + std::to_string(m);
    }
    const std::string emergence =
        report.emergence_order ? std::to_string(*report.emergence_order) : "none";

    if (format == "json") {
        ordered_json j;
        j["scenario"] = s.id;
        j["family"] = table.family_id;
        j["max_order"] = table.max_order;
        j["zero_tolerance"] = report.zero_tolerance;
        j["vanishing_orders"] = report.vanishing_orders;
        if (report.emergence_order) {
            j["emergence_order"] = *report.emergence_order;
            j["max_magnitude_at_emergence"] = report.max_magnitude_at_emergence;
        } else {
            j["emergence_order"] = nullptr;
        }
        ordered_json arr = ordered_json::array();
        for (const auto& [query, value] : table.entries) {
            if (query.order() == 0) {
                continue;
            }
            arr.push_back({{"order", query.order()},
                           {"sites", sites_column(query)},
                           {"labels", labels_column(query)},
                           {"weak_value", complex_json(value)},
                           {"magnitude", std::abs(value)}});
        }
        j["entries"] = arr;
        return j.dump(2) + "\n";
    }
    if (format == "csv") {
        std::string out;
        out += "# vanishing_orders=" + (vanishing.empty() ? std::string("none") : vanishing) + "\n";
        out += "# emergence_order=" + emergence + "\n";
        if (report.emergence_order) {
            out += "# max_magnitude_at_emergence=" + fmt17(report.max_magnitude_at_emergence) +
                   "\n";
        }
        out += "order,sites,labels,re,im,magnitude\n";
        for (const auto& [query, value] : table.entries) {
            if (query.order() == 0) {
                continue;
            }
            out += std::to_string(query.order()) + "," + sites_column(query) + "," +
                   labels_column(query) + "," + fmt17(value.real()) + "," + fmt17(value.imag()) +
                   "," + fmt17(std::abs(value)) + "\n";
        }
        return out;
    }
    std::string out = "scenario: " + s.id + scenario_param_suffix(s) + "\n";
    out += "family: " + table.family_id + "\n";
    out += "zero tolerance: " + fmt12(report.zero_tolerance) + "\n";
    out += "vanishing orders: " + (vanishing.empty() ? std::string("none") : vanishing) + "\n";
    out += "emergence order: " + emergence + "\n";
    if (report.emergence_order) {
        out += "max |value| at emergence: " + fmt12(report.max_magnitude_at_emergence) + "\n";
    }
    out += "order  sites  labels  value\n";
    for (const auto& [query, value] : table.entries) {
        if (query.order() == 0) {
            continue;
        }
        out += std::to_string(query.order()) + "  " + sites_column(query) + "  " +
               labels_column(query) + "  " + format_complex_snapped(value, report.zero_tolerance) +
               "\n";
    }
    return out;
}

std::string render_simulate(const Scenario& s, const std::string& obs, double g, double sigma,
                            std::size_t trials, std::uint64_t seed,
                            const WeakValueEstimate& est, double weight,
                            const std::string& format) {
    if (format == "json") {
        ordered_json j;
        j["scenario"] = s.id;
        j["observable"] = obs;
        j["g"] = g;
        j["sigma"] = sigma;
        j["trials"] = trials;
        j["seed"] = seed;
        j["estimate"] = est.estimate;
        j["std_error"] = est.std_error;
        j["post_selection_weight"] = weight;
        return j.dump(2) + "\n";
    }
    if (format == "csv") {
        std::string out =
            "scenario,observable,g,sigma,trials,seed,estimate,std_error,post_selection_weight\n";
        out += s.id + "," + obs + "," + fmt17(g) + "," + fmt17(sigma) + "," +
               std::to_string(trials) + "," + std::to_string(seed) + "," + fmt17(est.estimate) +
               "," + fmt17(est.std_error) + "," + fmt17(weight) + "\n";
        return out;
    }
    std::string out = "scenario: " + s.id + scenario_param_suffix(s) + "\n";
    out += "observable: " + obs + "\n";
    out += "g: " + fmt12(g) + "  sigma: " + fmt12(sigma) + "  trials: " + std::to_string(trials) +
           "  seed: " + std::to_string(seed) + "\n";
    out += "estimate: " + fmt12(est.estimate) + "\n";
    out += "std error: " + fmt12(est.std_error) + "\n";
    out += "post-selection weight: " + fmt12(weight) + "\n";
    return out;
}

std::string render_abl(const Scenario& s, const std::string& obs,
                       const SpectralDecomposition& spec, const std::vector<double>& probs,
                       const std::optional<double>& certain, bool dichotomic,
                       const std::string& format) {
    if (format == "json") {
        ordered_json j;
        j["scenario"] = s.id;
        j["observable"] = obs;
        j["eigenvalues"] = spec.eigenvalues;
        j["probabilities"] = probs;
        j["dichotomic"] = dichotomic;
        if (certain) {
            j["certain_outcome"] = *certain;
        } else {
            j["certain_outcome"] = nullptr;
        }
        return j.dump(2) + "\n";
    }
    if (format == "csv") {
        std::string out = "scenario,observable,eigenvalue,probability,certain\n";
        for (std::size_t i = 0; i < probs.size(); ++i) {
            const bool flag = certain && std::abs(spec.eigenvalues[i] - *certain) <
                                             kDichotomicMatchTolerance;
            out += s.id + "," + obs + "," + fmt17(spec.eigenvalues[i]) + "," + fmt17(probs[i]) +
                   "," + (flag ? "1" : "0") + "\n";
        }
        return out;
    }
    std::string out = "scenario: " + s.id + scenario_param_suffix(s) + "\n";
    out += "observable: " + obs + "\n";
    out += "eigenvalue  probability\n";
    for (std::size_t i = 0; i < probs.size(); ++i) {
        out += fmt12(spec.eigenvalues[i]) + "  " + fmt12(probs[i]) + "\n";
    }
    if (!dichotomic) {
        out += "certainty: n/a (operator is not dichotomic)\n";
    } else if (certain) {
        out += "certain outcome: " + fmt12(*certain) + "\n";
    } else {
        out += "certain outcome: none (weak value is not an eigenvalue)\n";
    }
    return out;
}

std::set<std::string> parse_label_list(const std::string& text) {
    std::set<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            out.insert(item);
        }
    }
    if (out.empty()) {
        throw UsageError("empty label list");
    }
    return out;
}

std::set<std::size_t> parse_site_list(const std::string& text, std::size_t site_count) {
    std::set<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        std::size_t v = 0;
        try {
            v = std::stoul(item);
        } catch (const std::exception&) {
            throw UsageError("malformed site index '" + item + "'");
        }
        if (v == 0 || v > site_count) {
            throw UsageError("site index " + item + " out of range (1.." +
                             std::to_string(site_count) + ")");
        }
        out.insert(v - 1);
    }
    if (out.empty()) {
        throw UsageError("empty site list");
    }
    return out;
}

const ProjectorFamily& pick_family(const Scenario& s, const std::string& requested) {
    if (!requested.empty()) {
        const auto it = s.families.find(requested);
        if (it == s.families.end()) {
            throw UsageError("scenario has no projector family named '" + requested + "'");
        }
        return it->second;
    }
    if (s.families.empty()) {
        throw NumericError("scenario '" + s.id + "' has no projector family");
    }
    if (s.families.size() > 1) {
        throw UsageError("scenario has several projector families; pick one with --family");
    }
    return s.families.begin()->second;
}

} // namespace

cplx parse_complex_literal(const std::string& text) {
    std::string s;
    for (const char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch))) {
            s += ch;
        }
    }
    if (s.empty()) {
        throw ParseError("empty complex literal");
    }
    // Split at the last '+'/'-' that is not the leading sign and not part of
    // an exponent; if none, the whole string is one part.
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    const auto parse_part = [&](std::string part, bool imaginary) -> double {
        if (imaginary) {
            if (part.empty() || (part.back() != 'i' && part.back() != 'I')) {
                throw ParseError("malformed complex literal '" + text + "'");
            }
            part.pop_back();
            if (part.empty() || part == "+") {
                part = "1";
            } else if (part == "-") {
                part = "-1";
            }
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(part, &used);
            if (used != part.size()) {
                throw ParseError("malformed complex literal '" + text + "'");
            }
            return v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("malformed complex literal '" + text + "'");
        }
    };

    if (split == std::string::npos) {
        if (s.back() == 'i' || s.back() == 'I') {
            return {0.0, parse_part(s, true)};
        }
        return {parse_part(s, false), 0.0};
    }
    const std::string head = s.substr(0, split);
    const std::string tail = s.substr(split);
    if (tail.back() == 'i' || tail.back() == 'I') {
        return {parse_part(head, false), parse_part(tail, true)};
    }
    throw ParseError("malformed complex literal '" + text + "'");
}

std::string format_complex(cplx z) {
    const double re = z.real() == 0.0 ? 0.0 : z.real();
    const double im = z.imag() == 0.0 ? 0.0 : z.imag();
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", re, im);
    return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Weak values, correlation hierarchies and pointer simulations for "
                 "pre- and post-selected ensembles"};
    app.name("tsvf");
    app.require_subcommand(1);

    // list
    auto* cmd_list = app.add_subcommand("list", "List built-in scenarios and their parameters");
    CommonOpts list_opts;
    add_common(cmd_list, list_opts);

    // weak
    auto* cmd_weak = app.add_subcommand("weak", "Weak value of one or more observables");
    ScenarioArgs weak_scenario;
    CommonOpts weak_opts;
    std::vector<std::string> weak_obs;
    add_scenario_options(cmd_weak, weak_scenario);
    cmd_weak->add_option("--obs", weak_obs, "Observable name or query (e.g. LL, L1*L2, a1*a2)")
        ->required();
    add_common(cmd_weak, weak_opts);

    // hierarchy
    auto* cmd_hier = app.add_subcommand("hierarchy",
                                        "Correlation table and emergence-order report");
    ScenarioArgs hier_scenario;
    CommonOpts hier_opts;
    std::string hier_labels;
    std::string hier_family;
    std::string hier_keep;
    long long hier_max_order = -1;
    double hier_tolerance = kZeroTolerance;
    add_scenario_options(cmd_hier, hier_scenario);
    cmd_hier->add_option("--labels", hier_labels, "Comma-separated projector labels to enumerate");
    cmd_hier->add_option("--family", hier_family, "Projector family name (when several exist)");
    auto* max_order_opt =
        cmd_hier->add_option("--max-order", hier_max_order, "Highest correlation order");
    cmd_hier
        ->add_option("--keep-sites", hier_keep,
                     "Comma-separated 1-based sites to keep; the rest are discarded")
        ->excludes(max_order_opt);
    cmd_hier->add_option("--tolerance", hier_tolerance, "Zero tolerance for vanishing entries")
        ->capture_default_str();
    add_common(cmd_hier, hier_opts);

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate",
                                       "Gaussian-pointer Monte-Carlo weak measurement");
    ScenarioArgs sim_scenario;
    CommonOpts sim_opts;
    std::string sim_obs;
    std::string sim_readings_out;
    double sim_g = 0.0;
    double sim_sigma = 1.0;
    std::size_t sim_trials = 10000;
    std::uint64_t sim_seed = 0;
    add_scenario_options(cmd_sim, sim_scenario);
    cmd_sim->add_option("--obs", sim_obs, "Hermitian observable to couple to")->required();
    cmd_sim->add_option("--g", sim_g, "Coupling strength (nonzero)")->required();
    cmd_sim->add_option("--sigma", sim_sigma, "Pointer width")->capture_default_str();
    cmd_sim->add_option("--trials", sim_trials, "Number of post-selected samples")
        ->capture_default_str();
    cmd_sim->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    cmd_sim->add_option("--readings-out", sim_readings_out,
                        "Write raw readings as CSV to this path");
    add_common(cmd_sim, sim_opts);

    // abl
    auto* cmd_abl = app.add_subcommand("abl",
                                       "Strong-measurement outcome probabilities (ABL rule)");
    ScenarioArgs abl_scenario;
    CommonOpts abl_opts;
    std::string abl_obs;
    add_scenario_options(cmd_abl, abl_scenario);
    cmd_abl->add_option("--obs", abl_obs, "Hermitian observable")->required();
    add_common(cmd_abl, abl_opts);

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("tsvf");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_list->parsed()) {
            emit(render_list(list_opts.format), list_opts.out_path, out);
        } else if (cmd_weak->parsed()) {
            const Scenario s = load_scenario(weak_scenario);
            emit(render_weak(s, weak_obs, weak_opts.format), weak_opts.out_path, out);
        } else if (cmd_hier->parsed()) {
            const Scenario s = load_scenario(hier_scenario);
            const auto& family = pick_family(s, hier_family);
            std::optional<std::set<std::string>> filter;
            if (!hier_labels.empty()) {
                filter = parse_label_list(hier_labels);
            }
            if (!hier_keep.empty()) {
                const auto kept = parse_site_list(hier_keep, s.space->site_count());
                const auto restricted =
                    restrict_sites(s.two_state, family, kept, filter, hier_tolerance);
                emit(render_hierarchy(s, restricted.table, restricted.report, hier_opts.format),
                     hier_opts.out_path, out);
            } else {
                std::size_t max_order = s.space->site_count();
                if (hier_max_order >= 0) {
                    max_order = static_cast<std::size_t>(hier_max_order);
                }
                const auto table = enumerate_correlations(s.two_state, family, max_order, filter);
                const auto report = detect_hierarchy(table, hier_tolerance);
                emit(render_hierarchy(s, table, report, hier_opts.format), hier_opts.out_path,
                     out);
            }
        } else if (cmd_sim->parsed()) {
            if (sim_g == 0.0) {
                throw UsageError("--g must be nonzero");
            }
            if (sim_sigma <= 0.0) {
                throw UsageError("--sigma must be positive");
            }
            const Scenario s = load_scenario(sim_scenario);
            const LinearOp op = materialize_query(s, sim_obs);
            GaussianPointer pointer;
            pointer.sigma = sim_sigma;
            pointer.coupling = sim_g;
            const PointerMixture mix = couple(s.two_state, op, pointer);
            MeasurementRecord rec = sample(mix, sim_trials, sim_seed);
            rec.coupling = sim_g;
            rec.scenario_id = s.id;
            const auto est = estimate_real_weak_value(rec, sim_g);
            if (!sim_readings_out.empty()) {
                std::ofstream file(sim_readings_out, std::ios::binary);
                if (!file) {
                    throw Error("cannot open output file '" + sim_readings_out + "'");
                }
                write_record_csv(file, rec);
            }
            emit(render_simulate(s, sim_obs, sim_g, sim_sigma, sim_trials, sim_seed, est,
                                 rec.post_selection_weight, sim_opts.format),
                 sim_opts.out_path, out);
        } else if (cmd_abl->parsed()) {
            const Scenario s = load_scenario(abl_scenario);
            const LinearOp op = materialize_query(s, abl_obs);
            const auto spec = spectral_decompose(op);
            const auto probs = abl_probabilities(s.two_state, spec);
            const bool dichotomic = spec.eigenvalues.size() == 2;
            std::optional<double> certain;
            if (dichotomic) {
                certain = dichotomic_certainty(s.two_state, op);
            }
            emit(render_abl(s, abl_obs, spec, probs, certain, dichotomic, abl_opts.format),
                 abl_opts.out_path, out);
        }
        return 0;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace tsvf::cli
