#pragma once

// Symmetry operators, projectors, the minimal-coupling operator and its dual,
// operator conjugation / charge decomposition, and the gauging maps. Diagonal
// operators carry exact rational phases; everything else is sparse complex.

#include <map>
#include <optional>

#include "hfent/hilbert.hpp"
#include "hfent/homology.hpp"

namespace hfent {

// U(phi) for an arbitrary p-cochain: diagonal phase <k(config), phi>.
DiagOp matter_phase(const HilbertModel& m, const Cochain& phi);
// Symmetry operator: matter_phase restricted to closed phi (delta phi = 0).
DiagOp sym_op(const HilbertModel& m, const Cochain& phi);
// Wilson operator U~(k') for an arbitrary (p+1)-chain: phase <k', gamma>.
DiagOp wilson_op(const HilbertModel& m, const Chain& kp);
// Dual symmetry operator: wilson_op restricted to cycles (del k = 0).
DiagOp sym_op_dual(const HilbertModel& m, const Chain& k);
// 't Hooft operator T~(phi'): shifts group labels by phi'; regular sites only.
PermOp thooft_op(const HilbertModel& m, const Cochain& phip);

DiagOp projector_P(const HilbertModel& m, const Chain& k);
DiagOp projector_Ptilde(const HilbertModel& m, const Cochain& phip);
// sum_{k in B_p} P(k) and sum_{phi' in B^{p+1}} P~(phi').
DiagOp projector_sym(const HilbertModel& m);
DiagOp projector_sym_dual(const HilbertModel& m);
DiagOp projector_inv(const HilbertModel& m);
// Joint fixed space of all matter symmetry operators {U(phi): phi in Z^p}
// (resp. of all dual operators {U~(k): k in Z_{p+1}}), computed from the
// symmetry generators directly, as an independent route to projector_sym.
DiagOp projector_fixed_matter(const HilbertModel& m);
DiagOp projector_fixed_gauge(const HilbertModel& m);

struct ChargeSector {
    ModVec sector;  // class of k in C_p/B_p
    std::vector<std::int64_t> sector_factors;
    std::optional<ModVec> homology_class;  // present iff del k = 0
    std::vector<std::int64_t> homology_factors;
};
ChargeSector charge_sector(const HilbertModel& m, const Chain& k);

// Additive canonical preimage section of del: B_p -> C_{p+1}, built from the
// invariant-factor decomposition of B_p with torsion-constrained solves so
// that apply(a+b) = apply(a)+apply(b) exactly. A capability error is raised
// when no homomorphic section exists (the extension by Z_{p+1} fails to
// split); that never happens for the library corpora.
class BoundarySection {
public:
    BoundarySection(const DeltaComplex& X, const FiniteAbelianGroup& G, int p);
    bool contains(const ModVec& k) const { return B_.contains(k); }
    const SubgroupModM& subgroup() const { return B_; }
    // (p+1)-chain coordinates with del = k; nullopt when k is not a boundary.
    std::optional<ModVec> apply(const ModVec& k) const;

private:
    SubgroupModM B_;
    QuotientStructure Q_;
    std::vector<ModVec> u_;
    ModVec src_moduli_;
};

// Mirror image for delta: B^{p+1} -> C^p.
class CoboundarySection {
public:
    CoboundarySection(const DeltaComplex& X, const FiniteAbelianGroup& G, int p);
    bool contains(const ModVec& phip) const { return B_.contains(phip); }
    const SubgroupModM& subgroup() const { return B_; }
    std::optional<ModVec> apply(const ModVec& phip) const;

private:
    SubgroupModM B_;
    QuotientStructure Q_;
    std::vector<ModVec> u_;
    ModVec src_moduli_;
};

// Generic coupling builder: charge config pi survives iff kp[pi] holds a
// (p+1)-chain (coordinates over chain_moduli(X, G, p+1)), with gauge-config
// phase <kp[pi], gamma>. All coupling operators are instances of this.
DiagOp coupling_from_sector_chains(const HilbertModel& m,
                                   const std::vector<std::optional<ModVec>>& kp);

// The minimal-coupling operator: basis vector with charge config k and gauge
// config gamma gets phase <k'(k), gamma> when k is a p-boundary and is
// annihilated otherwise.
DiagOp minimal_coupling(const HilbertModel& m);
// Alternative preimage choice: every sector's k' is shifted by the fixed
// (p+1)-cycle z. Must agree with minimal_coupling on the invariant subspace.
DiagOp minimal_coupling_shifted(const HilbertModel& m, const Chain& z);
// Dual construction from coboundary preimages; equals minimal_coupling on the
// invariant subspace.
DiagOp dual_coupling(const HilbertModel& m);

// Conjugation of a matter operator O (on the p-register) by the minimal
// coupling: direct sandwich and charge-decomposition routes coincide.
SparseOp conjugate(const HilbertModel& m, const SparseOp& O_p);
SparseOp conjugate_direct(const HilbertModel& m, const SparseOp& O_p);
SparseOp conjugate_decomposed(const HilbertModel& m, const SparseOp& O_p);

// Charge components: O_q = sum_k P(k) O P(k-q), indexed by the charge shift q
// in p-chain coordinates. Components sum back to O.
std::map<ModVec, SparseOp> decompose_components(const HilbertModel& m, const SparseOp& O_p);

// Gauge transformation U(phi)T~(delta phi) for an arbitrary p-cochain phi.
PermOp gauge_transformation(const HilbertModel& m, const Cochain& phi);
// Gauging map on states: |G|^{-#p-simplices} sum_phi U(phi)T~(delta phi)
// applied to psi_p tensor |id...id>.
StateVector gauge_state(const HilbertModel& m, const StateVector& psi_p,
                        std::int64_t enum_cap = 1 << 16);
// Gauging map on operators: |Z^p|^{-1} sum_phi gt(phi) (O tensor |id><id|) gt(phi)^dag.
SparseOp gauge_operator_prime(const HilbertModel& m, const SparseOp& O_p,
                              std::int64_t enum_cap = 1 << 16);

}  // namespace hfent
