#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "tsvf/scenarios.hpp"

using namespace tsvf;

namespace {

CorrelationQuery all_l(std::size_t n) {
    CorrelationQuery q;
    for (std::size_t i = 0; i < n; ++i) {
        q.assignment.emplace(i, "L");
    }
    return q;
}

cplx photon_oracle_full_r(const Scenario& s, std::size_t n) {
    const cplx I(0.0, 1.0);
    oracle::cmat proj_r = oracle::zeros(3);
    proj_r[1][1] = 0.5;
    proj_r[1][2] = -0.5 * I;
    proj_r[2][1] = 0.5 * I;
    proj_r[2][2] = 0.5;
    const std::vector<std::size_t> dims(n, 3);
    std::size_t dim = 1;
    for (std::size_t i = 0; i < n; ++i) {
        dim *= 3;
    }
    oracle::cmat product = oracle::identity(dim);
    for (std::size_t k = 0; k < n; ++k) {
        product = oracle::matmul(product, oracle::embed(proj_r, k, dims));
    }
    return oracle::weak_value(testsup::from_eigen(s.two_state.post().amps()),
                              testsup::from_eigen(s.two_state.pre().amps()), product);
}

} // namespace

TEST_CASE("two_box: golden weak values and overlap") {
    const Scenario s = two_box();
    CHECK(weak_value(s.two_state, s.observables.at("L1")) == cplx(0.0));
    CHECK(weak_value(s.two_state, s.observables.at("L2")) == cplx(0.0));
    CHECK(weak_value(s.two_state, s.observables.at("R1")) == cplx(1.0));
    CHECK(weak_value(s.two_state, s.observables.at("R2")) == cplx(1.0));
    CHECK(weak_value(s.two_state, s.observables.at("LL")) == cplx(-1.0));
    CHECK(weak_value(s.two_state, s.observables.at("LR")) == cplx(1.0));
    CHECK(weak_value(s.two_state, s.observables.at("RL")) == cplx(1.0));
    CHECK(weak_value(s.two_state, s.observables.at("RR")) == cplx(0.0));
    CHECK(s.two_state.overlap().real() ==
          doctest::Approx(-1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-14));
}

TEST_CASE("hydrogen: proton-electron correlations") {
    const Scenario s = hydrogen();
    const cplx pb = weak_value(s.two_state, s.observables.at("pB"));
    const cplx gr = weak_value(s.two_state, s.observables.at("pB-gr"));
    const cplx ex = weak_value(s.two_state, s.observables.at("pB-ex"));
    CHECK(pb == cplx(0.0));
    CHECK(gr == cplx(1.0));
    CHECK(ex == cplx(-1.0));
    CHECK(gr + ex == cplx(0.0));
}

TEST_CASE("em_energy: empty boxes, all energy in the interference term") {
    const Scenario s = two_box();
    {
        const auto parts = em_energy({{1.0, 1.0}, "L"}, s);
        CHECK(parts.e1_squared == cplx(0.0));
        CHECK(parts.e2_squared == cplx(0.0));
        CHECK(parts.cross == cplx(-2.0));
        CHECK(parts.total == cplx(-2.0));
    }
    {
        const auto parts = em_energy({{0.0, 5.0}, "L"}, s);
        CHECK(parts.total == cplx(0.0));
    }
    {
        const auto parts = em_energy({{2.0, 3.0}, "L"}, s);
        CHECK(parts.cross == cplx(-12.0));
        CHECK(parts.total == cplx(-12.0));
    }
    CHECK_THROWS_AS(em_energy({{1.0}, "L"}, s), DimensionError);
}

TEST_CASE("n_body: hierarchy at N=5, C=1") {
    const Scenario s = n_body(5, cplx(1.0, 0.0));
    const auto table = enumerate_correlations(s.two_state, s.families.at("box"), 5,
                                              std::set<std::string>{"L"});
    for (const auto& [query, value] : table.entries) {
        if (query.order() > 0 && query.order() < 5) {
            CHECK(value == cplx(0.0));
        }
    }
    CHECK(table.at(all_l(5)) == cplx(1.0));
}

TEST_CASE("n_body: small C amplifies the emergent correlation") {
    // C = 0.01 is not binary-exact, so 1/C only matches to rounding.
    const Scenario s = n_body(3, cplx(0.01, 0.0));
    const cplx value = weak_value(s.two_state, s.observables.at("full-L"));
    CHECK(std::abs(value - cplx(100.0)) < 1e-12 * 100.0);
}

TEST_CASE("n_body: right-box projectors have weak value 1") {
    const Scenario s = n_body(2, cplx(0.7, 0.3));
    const auto table = enumerate_correlations(s.two_state, s.families.at("box"), 1,
                                              std::set<std::string>{"R"});
    CorrelationQuery r1;
    r1.assignment.emplace(0, "R");
    CorrelationQuery r2;
    r2.assignment.emplace(1, "R");
    CHECK(std::abs(table.at(r1) - cplx(1.0)) < 1e-13);
    CHECK(std::abs(table.at(r2) - cplx(1.0)) < 1e-13);

    // Independent route at N=2.
    auto pi_r = oracle::zeros(2);
    pi_r[1][1] = 1.0;
    const cplx brute = oracle::weak_value(testsup::from_eigen(s.two_state.post().amps()),
                                          testsup::from_eigen(s.two_state.pre().amps()),
                                          oracle::embed(pi_r, 0, {2, 2}));
    CHECK(std::abs(table.at(r1) - brute) < 1e-14);
}

TEST_CASE("n_body: C = 0 and out-of-range N are rejected") {
    CHECK_THROWS_AS(n_body(3, cplx(0.0, 0.0)), OrthogonalError);
    CHECK_THROWS_AS(n_body(1, cplx(1.0, 0.0)), DimensionError);
    CHECK_THROWS_AS(n_body(15, cplx(1.0, 0.0)), DimensionError);
}

TEST_CASE("built-ins are admissible for every legal parameter tried") {
    for (std::size_t n = 2; n <= 8; ++n) {
        for (const cplx c : {cplx(1.0, 0.0), cplx(-2.0, 0.0), cplx(0.0, 0.1), cplx(1e-3, 0.0)}) {
            const Scenario s = n_body(n, c);
            CHECK(std::abs(s.two_state.overlap()) > 0.0);
        }
    }
    for (std::size_t n = 1; n <= 6; ++n) {
        CHECK(std::abs(photon_polarization(n).two_state.overlap()) ==
              doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(fock_chain(n).two_state.overlap()) ==
              doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    }
}

TEST_CASE("n_body: phase of C moves the emergent value, not the hierarchy") {
    const std::size_t n = 4;
    const Scenario base = n_body(n, cplx(1.0, 0.0));
    const cplx base_top = weak_value(base.two_state, base.observables.at("full-L"));
    for (const double theta : {M_PI / 4.0, M_PI / 2.0, M_PI}) {
        const cplx c = std::polar(1.0, theta);
        const Scenario s = n_body(n, c);
        const auto table = enumerate_correlations(s.two_state, s.families.at("box"), n,
                                                  std::set<std::string>{"L"});
        const auto report = detect_hierarchy(table);
        CHECK(report.vanishing_orders == std::set<std::size_t>{1, 2, 3});
        REQUIRE(report.emergence_order.has_value());
        CHECK(*report.emergence_order == n);
        // Emergent value picks up exactly e^{-i theta}.
        const cplx expected = base_top * std::polar(1.0, -theta);
        CHECK(std::abs(table.at(all_l(n)) - expected) < 1e-12);
    }
}

TEST_CASE("photon_polarization: circular products below order N vanish") {
    for (std::size_t n = 1; n <= 4; ++n) {
        const Scenario s = photon_polarization(n);
        const auto table = enumerate_correlations(s.two_state, s.families.at("circ"), n,
                                                  std::set<std::string>{"R"});
        for (const auto& [query, value] : table.entries) {
            if (query.order() > 0 && query.order() < n) {
                CHECK(std::abs(value) == 0.0);
            }
        }
        CorrelationQuery full;
        for (std::size_t i = 0; i < n; ++i) {
            full.assignment.emplace(i, "R");
        }
        const cplx top = table.at(full);
        const cplx brute = photon_oracle_full_r(s, n);
        CHECK(std::abs(top - brute) < 1e-12);
        // Oracle-confirmed closed form (i/2)^n.
        CHECK(std::abs(top - std::pow(cplx(0.0, 0.5), static_cast<double>(n))) < 1e-12);
    }
}

TEST_CASE("photon_polarization: overlap is the vacuum half") {
    const Scenario s = photon_polarization(3);
    CHECK(s.two_state.overlap().real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.two_state.overlap().imag() == 0.0);
}

TEST_CASE("fock_chain: sub-chain annihilation products vanish, the full product is 1") {
    for (std::size_t n = 1; n <= 6; ++n) {
        const Scenario s = fock_chain(n);
        // Every proper non-empty subset of modes.
        for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
            LinearOp prod = LinearOp::identity(s.space);
            for (std::size_t k = 0; k < n; ++k) {
                if (mask & (std::size_t{1} << k)) {
                    prod = compose(prod, fock_annihilation(k, s.space));
                }
            }
            CHECK(std::abs(weak_value(s.two_state, prod)) == 0.0);
        }
        CHECK(weak_value(s.two_state, s.observables.at("full-a")) == cplx(1.0));
    }
}

TEST_CASE("fock_chain: creation operators have vanishing weak values") {
    const Scenario s = fock_chain(3);
    for (std::size_t k = 0; k < 3; ++k) {
        const LinearOp creation = adjoint(fock_annihilation(k, s.space));
        CHECK(std::abs(weak_value(s.two_state, creation)) == 0.0);
    }
}

TEST_CASE("scenario files: two-box round trip is byte-stable and value-identical") {
    const Scenario s = two_box();
    const std::string text = serialize_scenario(s);
    const Scenario parsed = parse_scenario(text);
    CHECK(serialize_scenario(parsed) == text);
    CHECK(parsed.two_state.pre().amps() == s.two_state.pre().amps());
    CHECK(parsed.two_state.post().amps() == s.two_state.post().amps());
    const auto table_a = enumerate_correlations(s.two_state, s.families.at("box"), 2);
    const auto table_b = enumerate_correlations(parsed.two_state, parsed.families.at("box"), 2);
    for (const auto& [query, value] : table_a.entries) {
        CHECK(table_b.at(query) == value);
    }
    for (const auto& [name, op] : s.observables) {
        CHECK(testsup::max_abs_diff(parsed.observables.at(name).matrix(), op.matrix()) == 0.0);
    }
}

TEST_CASE("scenario files: N-body with complex C survives the round trip") {
    const Scenario s = n_body(3, cplx(0.0, 2.0));
    const Scenario parsed = parse_scenario(serialize_scenario(s));
    const auto table = enumerate_correlations(parsed.two_state, parsed.families.at("box"), 3,
                                              std::set<std::string>{"L"});
    // 1/C = 1/(2i) = -i/2.
    CHECK(std::abs(table.at(all_l(3)) - cplx(0.0, -0.5)) < 1e-13);
}

TEST_CASE("scenario files: malformed input is rejected with line diagnostics") {
    const char* bad_amplitude =
        "version = 1\n[space]\nsite0 = L R\n[pre]\nL = 0.5, oops\n[post]\nL = 1, 0\n";
    CHECK_THROWS_WITH_AS(parse_scenario(bad_amplitude), doctest::Contains("line 5"), ParseError);

    const char* unknown_label =
        "version = 1\n[space]\nsite0 = L R\n[pre]\nQ = 1, 0\n[post]\nL = 1, 0\n";
    CHECK_THROWS_WITH_AS(parse_scenario(unknown_label), doctest::Contains("unknown basis label"),
                         ParseError);

    const char* missing_post = "version = 1\n[space]\nsite0 = L R\n[pre]\nL = 1, 0\n";
    CHECK_THROWS_AS(parse_scenario(missing_post), ParseError);

    const char* bad_section = "version = 1\n[space]\nsite0 = L R\n[wat]\nx = 1\n";
    CHECK_THROWS_WITH_AS(parse_scenario(bad_section), doctest::Contains("unknown section"),
                         ParseError);
}

TEST_CASE("scenario files: orthogonal pre/post rejected at parse time") {
    const char* orthogonal =
        "version = 1\n[space]\nsite0 = L R\n[pre]\nL = 1, 0\n[post]\nR = 1, 0\n";
    CHECK_THROWS_WITH_AS(parse_scenario(orthogonal), doctest::Contains("orthogonal"), ParseError);
}

TEST_CASE("scenario parser survives garbage without undefined behavior") {
    oracle::Rng rng(4242);
    for (int rep = 0; rep < 500; ++rep) {
        std::string text;
        const std::size_t len = rng.eng() % 160;
        for (std::size_t i = 0; i < len; ++i) {
            const int pick = static_cast<int>(rng.eng() % 100);
            if (pick < 8) {
                text += '\n';
            } else if (pick < 12) {
                text += '=';
            } else if (pick < 16) {
                text += '[';
            } else if (pick < 20) {
                text += ']';
            } else {
                text += static_cast<char>(32 + rng.eng() % 95);
            }
        }
        CHECK_THROWS_AS(parse_scenario(text), Error);
    }
}

TEST_CASE("scenario files: every built-in round-trips") {
    const std::vector<Scenario> all = {two_box(), hydrogen(), n_body(3, cplx(0.5, 0.5)),
                                       photon_polarization(2), fock_chain(3)};
    for (const auto& s : all) {
        const std::string text = serialize_scenario(s);
        const Scenario parsed = parse_scenario(text);
        CHECK(serialize_scenario(parsed) == text);
        CHECK(parsed.two_state.pre().amps() == s.two_state.pre().amps());
        CHECK(parsed.two_state.post().amps() == s.two_state.post().amps());
    }
}
