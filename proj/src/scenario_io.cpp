#include <cctype>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "tsvf/scenarios.hpp"

namespace tsvf {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
        ++a;
    }
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
        --b;
    }
    return s.substr(a, b - a);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (ss >> tok) {
        out.push_back(tok);
    }
    return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw ParseError("scenario line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& s, std::size_t line, const char* field) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            fail(line, std::string("trailing characters in ") + field + " '" + s + "'");
        }
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(line, std::string("malformed ") + field + " '" + s + "'");
    }
}

// "re, im" pair.
cplx parse_cplx_pair(const std::string& s, std::size_t line, const char* field) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) {
        fail(line, std::string("expected 're, im' for ") + field + ", got '" + s + "'");
    }
    const double re = parse_double(trim(s.substr(0, comma)), line, field);
    const double im = parse_double(trim(s.substr(comma + 1)), line, field);
    return {re, im};
}

// Rows ';'-separated, entries "re,im" whitespace-separated within a row.
Eigen::MatrixXcd parse_matrix(const std::string& s, std::size_t line, std::size_t dim) {
    std::vector<std::vector<cplx>> rows;
    std::stringstream ss(s);
    std::string row;
    while (std::getline(ss, row, ';')) {
        std::vector<cplx> entries;
        for (const auto& tok : split_ws(row)) {
            entries.push_back(parse_cplx_pair(tok, line, "matrix entry"));
        }
        rows.push_back(std::move(entries));
    }
    if (rows.size() != dim) {
        fail(line, "matrix has " + std::to_string(rows.size()) + " rows, expected " +
                       std::to_string(dim));
    }
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
        if (rows[r].size() != dim) {
            fail(line, "matrix row " + std::to_string(r) + " has " +
                           std::to_string(rows[r].size()) + " entries, expected " +
                           std::to_string(dim));
        }
        for (std::size_t c = 0; c < dim; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_pair(cplx z) { return fmt_double(z.real()) + ", " + fmt_double(z.imag()); }

struct RawSection {
    std::string header; // text inside the brackets
    std::size_t line;
    std::vector<std::pair<std::size_t, std::string>> lines; // (line number, content)
};

} // namespace

Scenario parse_scenario(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;

    std::string id = "scenario";
    std::optional<int> version;
    std::vector<RawSection> sections;
    RawSection* current = nullptr;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail(lineno, "unterminated section header '" + line + "'");
            }
            sections.push_back({trim(line.substr(1, line.size() - 2)), lineno, {}});
            current = &sections.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(lineno, "expected 'key = value', got '" + line + "'");
        }
        if (!current) {
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key == "version") {
                version = static_cast<int>(parse_double(value, lineno, "version"));
            } else if (key == "id") {
                id = value;
            } else {
                fail(lineno, "unknown top-level key '" + key + "'");
            }
            continue;
        }
        current->lines.emplace_back(lineno, line);
    }
    if (version && *version != 1) {
        throw ParseError("scenario: unsupported version " + std::to_string(*version));
    }

    // [space] first; everything else needs it.
    SpacePtr space;
    for (const auto& sec : sections) {
        if (sec.header != "space") {
            continue;
        }
        std::vector<LocalSpace> sites;
        for (const auto& [ln, line] : sec.lines) {
            const auto eq = line.find('=');
            const std::string key = trim(line.substr(0, eq));
            if (key != "site" + std::to_string(sites.size())) {
                fail(ln, "expected 'site" + std::to_string(sites.size()) + "', got '" + key +
                             "' (sites must appear in order)");
            }
            const auto labels = split_ws(trim(line.substr(eq + 1)));
            if (labels.empty()) {
                fail(ln, "site with no basis labels");
            }
            try {
                sites.push_back(LocalSpace::with_labels(labels));
            } catch (const Error& e) {
                fail(ln, e.what());
            }
        }
        if (sites.empty()) {
            fail(sec.line, "[space] section declares no sites");
        }
        space = make_space(std::move(sites));
    }
    if (!space) {
        throw ParseError("scenario: missing [space] section");
    }

    auto parse_ket = [&](const RawSection& sec) {
        Eigen::VectorXcd amps =
            Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(space->total_dimension()));
        for (const auto& [ln, line] : sec.lines) {
            const auto eq = line.find('=');
            const std::string key = trim(line.substr(0, eq));
            std::size_t index = 0;
            try {
                index = space->index_of_label(key);
            } catch (const ParseError& e) {
                fail(ln, e.what());
            }
            amps(static_cast<Eigen::Index>(index)) =
                parse_cplx_pair(trim(line.substr(eq + 1)), ln, "amplitude");
        }
        return Ket(space, std::move(amps));
    };

    std::optional<Ket> pre;
    std::optional<Ket> post;
    std::map<std::string, LinearOp> observables;
    std::map<std::string, ProjectorFamily> families;
    std::map<std::string, cplx> params;

    for (const auto& sec : sections) {
        const auto head = split_ws(sec.header);
        if (sec.header == "space") {
            continue;
        }
        if (sec.header == "pre") {
            pre = parse_ket(sec);
        } else if (sec.header == "post") {
            post = parse_ket(sec);
        } else if (sec.header == "params") {
            for (const auto& [ln, line] : sec.lines) {
                const auto eq = line.find('=');
                params[trim(line.substr(0, eq))] =
                    parse_cplx_pair(trim(line.substr(eq + 1)), ln, "parameter");
            }
        } else if (head.size() == 2 && head[0] == "observable") {
            Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(
                static_cast<Eigen::Index>(space->total_dimension()),
                static_cast<Eigen::Index>(space->total_dimension()));
            for (const auto& [ln, line] : sec.lines) {
                const auto eq = line.find('=');
                const std::string key = trim(line.substr(0, eq));
                const auto bar = key.find('|');
                if (bar == std::string::npos) {
                    fail(ln, "observable entry key must be '<row> | <col>', got '" + key + "'");
                }
                std::size_t r = 0;
                std::size_t c = 0;
                try {
                    r = space->index_of_label(trim(key.substr(0, bar)));
                    c = space->index_of_label(trim(key.substr(bar + 1)));
                } catch (const ParseError& e) {
                    fail(ln, e.what());
                }
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    parse_cplx_pair(trim(line.substr(eq + 1)), ln, "matrix entry");
            }
            observables.emplace(head[1], LinearOp(space, std::move(m)));
        } else if (head.size() == 2 && head[0] == "family") {
            std::vector<ProjectorFamily::SiteProjectors> per_site(space->site_count());
            for (const auto& [ln, line] : sec.lines) {
                const auto eq = line.find('=');
                const std::string key = trim(line.substr(0, eq));
                const auto dot = key.find('.');
                if (dot == std::string::npos || key.substr(0, 4) != "site") {
                    fail(ln, "family entry key must be 'site<i>.<label>', got '" + key + "'");
                }
                std::size_t site = 0;
                try {
                    site = std::stoul(key.substr(4, dot - 4));
                } catch (const std::exception&) {
                    fail(ln, "malformed site index in '" + key + "'");
                }
                if (site >= space->site_count()) {
                    fail(ln, "site index " + std::to_string(site) + " out of range");
                }
                per_site[site].emplace_back(
                    key.substr(dot + 1),
                    parse_matrix(trim(line.substr(eq + 1)), ln, space->site(site).dimension()));
            }
            try {
                families.emplace(head[1], ProjectorFamily(space, std::move(per_site), head[1]));
            } catch (const Error& e) {
                fail(sec.line, std::string("family '") + head[1] + "': " + e.what());
            }
        } else {
            fail(sec.line, "unknown section [" + sec.header + "]");
        }
    }

    if (!pre || !post) {
        throw ParseError("scenario: missing [pre] or [post] section");
    }

    try {
        TwoState ts(std::move(*pre), std::move(*post), id);
        return Scenario{id, space, std::move(ts), std::move(observables), std::move(families),
                        std::move(params)};
    } catch (const OrthogonalError& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "version = 1\n";
    out << "id = " << s.id << "\n";

    out << "\n[space]\n";
    for (std::size_t i = 0; i < s.space->site_count(); ++i) {
        out << "site" << i << " =";
        for (const auto& label : s.space->site(i).labels()) {
            out << ' ' << label;
        }
        out << "\n";
    }

    if (!s.params.empty()) {
        out << "\n[params]\n";
        for (const auto& [name, value] : s.params) {
            out << name << " = " << fmt_pair(value) << "\n";
        }
    }

    const auto write_ket = [&](const char* header, const Ket& k) {
        out << "\n[" << header << "]\n";
        for (std::size_t i = 0; i < k.dimension(); ++i) {
            const cplx a = k.amp(i);
            if (a != cplx(0.0)) {
                out << s.space->index_label(i) << " = " << fmt_pair(a) << "\n";
            }
        }
    };
    write_ket("pre", s.two_state.pre());
    write_ket("post", s.two_state.post());

    for (const auto& [name, family] : s.families) {
        out << "\n[family " << name << "]\n";
        for (std::size_t site = 0; site < family.site_count(); ++site) {
            for (const auto& label : family.labels(site)) {
                const auto& m = family.projector(site, label);
                out << "site" << site << "." << label << " =";
                for (Eigen::Index r = 0; r < m.rows(); ++r) {
                    if (r > 0) {
                        out << " ;";
                    }
                    for (Eigen::Index c = 0; c < m.cols(); ++c) {
                        const cplx z = m(r, c);
                        out << ' ' << fmt_double(z.real()) << ',' << fmt_double(z.imag());
                    }
                }
                out << "\n";
            }
        }
    }

    for (const auto& [name, op] : s.observables) {
        out << "\n[observable " << name << "]\n";
        const auto& m = op.matrix();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                if (m(r, c) != cplx(0.0)) {
                    out << s.space->index_label(static_cast<std::size_t>(r)) << " | "
                        << s.space->index_label(static_cast<std::size_t>(c)) << " = "
                        << fmt_pair(m(r, c)) << "\n";
                }
            }
        }
    }
    return out.str();
}

} // namespace tsvf
