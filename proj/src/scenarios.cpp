#include "tsvf/scenarios.hpp"

#include <bit>
#include <cmath>

namespace tsvf {

namespace {

Eigen::MatrixXcd projector_on(std::size_t dim, std::size_t index) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                                static_cast<Eigen::Index>(dim));
    p(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return p;
}

// Eager named observables stay affordable only while the full matrix does.
constexpr std::size_t kEagerObservableMaxDim = 1024;

} // namespace

Scenario two_box() {
    auto space = make_space({LocalSpace::boxes(), LocalSpace::boxes()});
    const double half = 0.5;
    const double r3 = 1.0 / std::sqrt(3.0);

    Eigen::VectorXcd pre(4);
    pre << half, half, half, half; // (|L>+|R>)(|L>+|R>)/2, ordering LL,LR,RL,RR

    Eigen::VectorXcd post(4);
    post << r3, -r3, -r3, 0.0; // (|LL>-|LR>-|RL>)/sqrt(3)

    TwoState ts(Ket(space, pre), Ket(space, post), "two-box");

    const Eigen::MatrixXcd pi_l = projector_on(2, 0);
    const Eigen::MatrixXcd pi_r = projector_on(2, 1);
    ProjectorFamily family(space, {{{"L", pi_l}, {"R", pi_r}}, {{"L", pi_l}, {"R", pi_r}}},
                           "box");

    std::map<std::string, LinearOp> observables;
    observables.emplace("L1", embed_local(pi_l, 0, space));
    observables.emplace("L2", embed_local(pi_l, 1, space));
    observables.emplace("R1", embed_local(pi_r, 0, space));
    observables.emplace("R2", embed_local(pi_r, 1, space));
    observables.emplace("LL", embed_product(space, {{0, pi_l}, {1, pi_l}}));
    observables.emplace("LR", embed_product(space, {{0, pi_l}, {1, pi_r}}));
    observables.emplace("RL", embed_product(space, {{0, pi_r}, {1, pi_l}}));
    observables.emplace("RR", embed_product(space, {{0, pi_r}, {1, pi_r}}));

    return Scenario{"two-box", space, std::move(ts), std::move(observables),
                    {{"box", std::move(family)}}, {}};
}

Scenario hydrogen() {
    auto space = make_space({LocalSpace::with_labels({"A", "B"}),
                             LocalSpace::with_labels({"gr", "ex"})});
    const double r3 = 1.0 / std::sqrt(3.0);

    // Index order: A:gr, A:ex, B:gr, B:ex.
    Eigen::VectorXcd pre(4);
    pre << r3, 0.0, r3, r3;
    Eigen::VectorXcd post(4);
    post << r3, 0.0, r3, -r3;

    TwoState ts(Ket(space, pre), Ket(space, post), "hydrogen");

    const Eigen::MatrixXcd pi_a = projector_on(2, 0);
    const Eigen::MatrixXcd pi_b = projector_on(2, 1);
    const Eigen::MatrixXcd pi_gr = projector_on(2, 0);
    const Eigen::MatrixXcd pi_ex = projector_on(2, 1);
    ProjectorFamily family(space,
                           {{{"A", pi_a}, {"B", pi_b}}, {{"gr", pi_gr}, {"ex", pi_ex}}},
                           "basis");

    std::map<std::string, LinearOp> observables;
    observables.emplace("pB", embed_local(pi_b, 0, space));
    observables.emplace("pB-gr", embed_product(space, {{0, pi_b}, {1, pi_gr}}));
    observables.emplace("pB-ex", embed_product(space, {{0, pi_b}, {1, pi_ex}}));

    return Scenario{"hydrogen", space, std::move(ts), std::move(observables),
                    {{"basis", std::move(family)}}, {}};
}

Scenario n_body(std::size_t n, cplx c) {
    if (n < 2) {
        throw DimensionError("n_body: need at least 2 particles");
    }
    if (n > 14) {
        throw DimensionError("n_body: n capped at 14 (full enumeration is exponential)");
    }
    if (c == cplx(0.0)) {
        throw OrthogonalError("n_body: C = 0 is forbidden (orthogonal selections)");
    }
    auto space = make_space(std::vector<LocalSpace>(n, LocalSpace::qubit()));
    const std::size_t dim = space->total_dimension();

    // Weak values cannot see overall scale, so both states are stored with
    // exact amplitudes: pre = 2^{N/2} prod |up_x> is all ones, and the
    // 2^{N/2} prod <down_x| term of the post-selection becomes
    // prod(<up_z| - <down_z|) with amplitudes +-1. This keeps every
    // cancellation in the correlation hierarchy exact in floating point.
    Eigen::VectorXcd pre = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(dim));
    Eigen::VectorXcd post(static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) {
        post(static_cast<Eigen::Index>(i)) =
            static_cast<double>(std::popcount(i) % 2 == 0 ? 1 : -1);
    }
    // The stored post ket is the conjugate transpose of the post bra, so the
    // C prod <down_z| term contributes conj(C) at the all-down index.
    post(static_cast<Eigen::Index>(dim - 1)) += std::conj(c);

    TwoState ts(Ket(space, pre), Ket(space, post), "n-body");

    const Eigen::MatrixXcd pi_l = projector_on(2, 0); // (1 + sigma_z)/2
    const Eigen::MatrixXcd pi_r = projector_on(2, 1); // (1 - sigma_z)/2
    std::vector<ProjectorFamily::SiteProjectors> per_site(
        n, ProjectorFamily::SiteProjectors{{"L", pi_l}, {"R", pi_r}});
    ProjectorFamily family(space, std::move(per_site), "box");

    std::map<std::string, LinearOp> observables;
    if (dim <= kEagerObservableMaxDim) {
        std::map<std::size_t, Eigen::MatrixXcd> all_l;
        for (std::size_t i = 0; i < n; ++i) {
            all_l.emplace(i, pi_l);
        }
        observables.emplace("full-L", embed_product(space, all_l));
    }

    return Scenario{"n-body", space, std::move(ts), std::move(observables),
                    {{"box", std::move(family)}},
                    {{"N", cplx(static_cast<double>(n), 0.0)}, {"C", c}}};
}

Scenario photon_polarization(std::size_t n) {
    if (n < 1) {
        throw DimensionError("photon_polarization: need at least 1 photon");
    }
    if (n > 12) {
        throw DimensionError("photon_polarization: n capped at 12 (3^n dense cap)");
    }
    auto space = make_space(
        std::vector<LocalSpace>(n, LocalSpace::with_labels({"vac", "H", "V"})));
    const std::size_t dim = space->total_dimension();
    const double r2 = 1.0 / std::sqrt(2.0);

    // Basis digit order per site: vac=0, H=1, V=2.
    std::size_t all_h = 0;
    std::size_t all_v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        all_h = all_h * 3 + 1;
        all_v = all_v * 3 + 2;
    }
    Eigen::VectorXcd pre = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    pre(static_cast<Eigen::Index>(all_h)) = r2;
    pre(0) = r2; // global vacuum
    Eigen::VectorXcd post = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    post(static_cast<Eigen::Index>(all_v)) = r2;
    post(0) = r2;

    TwoState ts(Ket(space, pre), Ket(space, post), "photon");

    // |R> = (|H> + i|V>)/sqrt(2), |L> = (|H> - i|V>)/sqrt(2); the circular
    // projectors act on the occupied {H,V} subspace and annihilate the
    // vacuum. The vacuum projector completes the local identity, which the
    // family contract requires.
    const cplx I(0.0, 1.0);
    Eigen::MatrixXcd proj_r = Eigen::MatrixXcd::Zero(3, 3);
    proj_r(1, 1) = 0.5;
    proj_r(1, 2) = -0.5 * I;
    proj_r(2, 1) = 0.5 * I;
    proj_r(2, 2) = 0.5;
    Eigen::MatrixXcd proj_l = Eigen::MatrixXcd::Zero(3, 3);
    proj_l(1, 1) = 0.5;
    proj_l(1, 2) = 0.5 * I;
    proj_l(2, 1) = -0.5 * I;
    proj_l(2, 2) = 0.5;
    const Eigen::MatrixXcd proj_vac = projector_on(3, 0);

    std::vector<ProjectorFamily::SiteProjectors> per_site(
        n, ProjectorFamily::SiteProjectors{{"R", proj_r}, {"L", proj_l}, {"vac", proj_vac}});
    ProjectorFamily family(space, std::move(per_site), "circ");

    std::map<std::string, LinearOp> observables;
    if (dim <= kEagerObservableMaxDim) {
        std::map<std::size_t, Eigen::MatrixXcd> all_r;
        for (std::size_t i = 0; i < n; ++i) {
            all_r.emplace(i, proj_r);
        }
        observables.emplace("full-R", embed_product(space, all_r));
    }

    return Scenario{"photon", space, std::move(ts), std::move(observables),
                    {{"circ", std::move(family)}},
                    {{"N", cplx(static_cast<double>(n), 0.0)}}};
}

Scenario fock_chain(std::size_t n) {
    if (n < 1) {
        throw DimensionError("fock_chain: need at least 1 mode");
    }
    if (n > 20) {
        throw DimensionError("fock_chain: n capped at 20 (2^n dense cap)");
    }
    auto space = make_space(std::vector<LocalSpace>(n, LocalSpace::fock_mode(1)));
    const std::size_t dim = space->total_dimension();
    const double r2 = 1.0 / std::sqrt(2.0);

    Eigen::VectorXcd pre = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    pre(static_cast<Eigen::Index>(dim - 1)) = r2; // |1,1,...,1>
    pre(0) = r2;                                  // |0,0,...,0>
    Eigen::VectorXcd post = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    post(0) = 1.0;

    TwoState ts(Ket(space, pre), Ket(space, post), "fock");

    std::map<std::string, LinearOp> observables;
    if (dim <= kEagerObservableMaxDim) {
        LinearOp full = fock_annihilation(0, space);
        observables.emplace("a1", full);
        for (std::size_t k = 1; k < n; ++k) {
            LinearOp ak = fock_annihilation(k, space);
            full = compose(full, ak);
            observables.emplace("a" + std::to_string(k + 1), std::move(ak));
        }
        observables.emplace("full-a", std::move(full));
    }

    return Scenario{"fock", space, std::move(ts), std::move(observables), {},
                    {{"N", cplx(static_cast<double>(n), 0.0)}}};
}

EMEnergyParts em_energy(const EMEnergyModel& model, const Scenario& scenario) {
    if (model.charges.size() != 2) {
        throw DimensionError("em_energy: exactly two charges expected");
    }
    if (scenario.space->site_count() != 2) {
        throw DimensionError("em_energy: a two-particle box scenario is required");
    }
    const auto fam_it = scenario.families.find("box");
    if (fam_it == scenario.families.end()) {
        throw DimensionError("em_energy: scenario has no 'box' projector family");
    }
    const auto& family = fam_it->second;
    const cplx e1(model.charges[0], 0.0);
    const cplx e2(model.charges[1], 0.0);

    const LinearOp field1 =
        scale(e1, embed_local(family.projector(0, model.region), 0, scenario.space));
    const LinearOp field2 =
        scale(e2, embed_local(family.projector(1, model.region), 1, scenario.space));

    EMEnergyParts parts;
    parts.e1_squared = weak_value(scenario.two_state, compose(field1, field1));
    parts.e2_squared = weak_value(scenario.two_state, compose(field2, field2));
    parts.cross = 2.0 * weak_value(scenario.two_state, compose(field1, field2));
    parts.total = parts.e1_squared + parts.e2_squared + parts.cross;
    return parts;
}

} // namespace tsvf
