#pragma once

// Regional factorization of the minimal coupling across a bipartition: the
// preimage bookkeeping maps h, t_A/t_B, l_A/l_B, f1/f2 and the regional
// coupling operators they generate. Built only when the Mayer-Vietoris
// criterion holds; the construction then reproduces the global coupling on
// the invariant subspace exactly.

#include <map>

#include "hfent/operators.hpp"

namespace hfent {

class FactorizationData {
public:
    // Throws domain_error carrying the criterion diagnostic when mv fails.
    FactorizationData(const HilbertModel& m, Bipartition cut);

    const Bipartition& cut() const { return cut_; }
    const MvResult& criterion() const { return mv_; }

    // Preimage of an intersection boundary under del, odd by construction:
    // h(-x) = -h(x). Input and output are A-cap-B local chains; identically
    // zero at p = 0.
    Chain h(const Chain& x) const;
    // The common intersection cycle attached to a regional homology class
    // (class coordinates of H_p(A), resp. H_p(B)); A-cap-B local output.
    // Throws when the class is not in the matched image.
    Chain t_A(const ModVec& alpha) const;
    Chain t_B(const ModVec& beta) const;
    // Canonical boundary preimages inside one region (local coordinates).
    Chain l_A(const Chain& bdry) const;
    Chain l_B(const Chain& bdry) const;

    // C'_p membership and the regional preimage chains; k_A / k_Ac are
    // A-local resp. B-local p-chains (A^c chains live inside B). f1/f2 return
    // nullopt exactly off C'_p.
    bool in_cprime_A(const Chain& k_A) const { return static_cast<bool>(f1(k_A)); }
    bool in_cprime_Ac(const Chain& k_Ac) const { return static_cast<bool>(f2(k_Ac)); }
    std::optional<Chain> f1(const Chain& k_A) const;
    std::optional<Chain> f2(const Chain& k_Ac) const;

    // Regional couplings as diagonals on the full model space (each acts as
    // identity on the other region's sites).
    const DiagOp& U_A() const { return UA_; }
    const DiagOp& U_Ac() const { return UAc_; }
    DiagOp product() const { return UA_ * UAc_; }
    // ||(U - U_A U_Ac) P_inv|| in sup norm; 0 by construction.
    double residual() const;

private:
    struct TEntry {
        bool in_image = false;
        Chain z;        // AB-local intersection cycle
        ModVec other;   // matched class on the opposite side
    };
    const TEntry& t_from_A(const ModVec& alpha) const;
    const TEntry& t_from_B(const ModVec& beta) const;
    std::optional<Chain> regional_preimage(const Chain& k, bool side_A) const;
    void build_h_table();
    void check_invariants() const;

    const HilbertModel& m_;
    Bipartition cut_;
    MvResult mv_;
    int p_;
    HomologyStructure hA_, hB_, hAB_;
    InducedMap iA_, miB_;
    ModMap iA_map_, miB_map_;
    SubgroupModM b_pm1_ab_;            // B_{p-1}(A cap B), empty ambient at p = 0
    std::map<ModVec, ModVec> h_table_;  // (p-1)-boundary -> p-chain, AB-local coords
    mutable std::map<ModVec, TEntry> tA_cache_, tB_cache_;
    DiagOp UA_, UAc_;
};

FactorizationData factorize(const HilbertModel& m, const Bipartition& cut);

}  // namespace hfent
