#pragma once

#include <map>
#include <string>
#include <vector>

#include "tsvf/hierarchy.hpp"
#include "tsvf/twostate.hpp"

namespace tsvf {

/// A named, parameterized bundle: space, two-state, named observables and
/// projector families. The built-in constructors below cover the standard
/// pre-/post-selected ensembles; parse_scenario loads user-defined ones.
struct Scenario {
    std::string id;
    SpacePtr space;
    TwoState two_state;
    std::map<std::string, LinearOp> observables;
    std::map<std::string, ProjectorFamily> families;
    std::map<std::string, cplx> params;
};

/// Two particles, each superposed over boxes {L,R}:
/// pre = (|L>+|R>)(|L>+|R>)/2, post-ket = (|LL>-|LR>-|RL>)/sqrt(3).
/// Family "box"; named observables L1,L2,R1,R2,LL,LR,RL,RR.
Scenario two_box();

/// Hydrogen atom in boxes {A,B} with a two-level electron {gr,ex}:
/// pre = (|A,gr>+|B,gr>+|B,ex>)/sqrt(3), post-ket with the |B,ex> sign
/// flipped. Named observables pB, pB-gr, pB-ex.
Scenario hydrogen();

/// N spin-1/2 particles: pre proportional to the product of sigma_x +1
/// eigenstates, post-ket the conjugate source of
/// 2^{N/2} prod <down_x| + C prod <down_z|. Stored with exact integer
/// amplitudes (pre scaled by 2^{N/2}), which weak values cannot see.
/// Family "box" with L = (1+sigma_z)/2, R = (1-sigma_z)/2; named observable
/// full-L (materialized for n <= 10). C = 0 is rejected.
Scenario n_body(std::size_t n, cplx c);

/// N photon modes {vac,H,V}: pre = (prod |H> + vacuum)/sqrt(2),
/// post-ket = (prod |V> + vacuum)/sqrt(2). Family "circ" holds the circular
/// projectors R, L on the occupied subspace plus the vacuum projector that
/// completes the local identity. Named observable full-R (n <= 6).
Scenario photon_polarization(std::size_t n);

/// n Fock modes truncated at occupation 1: pre = (|1..1> + |0..0>)/sqrt(2),
/// post = |0..0|. Named observables a1..an and full-a. No projector family:
/// the interesting observables here are non-Hermitian ladder products.
Scenario fock_chain(std::size_t n);

/// Modeled electromagnetic field of charged box particles: the field of
/// particle i is E_i = e_i * Pi_region^{(i)}.
struct EMEnergyModel {
    std::vector<double> charges;
    std::string region = "L";
};

struct EMEnergyParts {
    cplx e1_squared;
    cplx e2_squared;
    cplx cross; // 2 <E1.E2>_w
    cplx total;
};

/// Weak values of the modeled energy-density terms for a two-particle box
/// scenario: <E1^2>, <E2^2>, 2<E1.E2> and their sum, computed by direct
/// operator products.
EMEnergyParts em_energy(const EMEnergyModel& model, const Scenario& scenario);

/// Flat key-value text format (see README for the grammar). The serializer
/// emits canonical ordering and round-trips bit-exactly; the parser rejects
/// malformed input with line/field diagnostics and refuses orthogonal
/// pre/post pairs.
Scenario parse_scenario(const std::string& text);
std::string serialize_scenario(const Scenario& s);

} // namespace tsvf
