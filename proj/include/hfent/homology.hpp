#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hfent/complex.hpp"
#include "hfent/group.hpp"
#include "hfent/zmod.hpp"

namespace hfent {

// Coordinate layout shared by C_n(X; G^) and C^n(X; G): simplex-major,
// group-factor-minor, so component (sigma, i) sits at sigma*rank + i with
// modulus d_i.
ModVec chain_moduli(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);

ModVec chain_to_vec(const FiniteAbelianGroup& G, const Chain& k);
Chain vec_to_chain(const FiniteAbelianGroup& G, int dim, const ModVec& v);
ModVec cochain_to_vec(const FiniteAbelianGroup& G, const Cochain& phi);
Cochain vec_to_cochain(const FiniteAbelianGroup& G, int dim, const ModVec& v);

ModMap boundary_map(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);
ModMap coboundary_map(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);

SubgroupModM cycles(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);
SubgroupModM boundaries(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);
SubgroupModM cocycles(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);
SubgroupModM coboundaries(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);

// Canonical preimage under del (resp. delta): the solution singled out by the
// Howell reduction, so identical inputs always yield identical outputs.
std::optional<Chain> boundary_preimage(const DeltaComplex& X, const FiniteAbelianGroup& G,
                                       const Chain& k);
std::optional<Cochain> coboundary_preimage(const DeltaComplex& X, const FiniteAbelianGroup& G,
                                           const Cochain& phip);

// Annihilator of S under the pairing <k, phi> = sum_c k_c * phi_c / m_c turns.
// Chain and cochain coordinates share moduli, so the ambient is symmetric.
SubgroupModM annihilator(const SubgroupModM& S);

// H_n (or H^n) with SNF invariant factors and explicit generator
// representatives kept as coordinate vectors.
class HomologyStructure {
  public:
    HomologyStructure(const DeltaComplex& X, const FiniteAbelianGroup& G, int n, bool co);

    const std::vector<std::int64_t>& factors() const { return q_.factors(); }
    int rank() const { return q_.rank(); }
    std::int64_t order() const { return q_.order(); }
    const QuotientStructure& quotient() const { return q_; }
    int dim() const { return n_; }
    bool is_cohomology() const { return co_; }
    const FiniteAbelianGroup& group() const { return G_; }

    const std::vector<ModVec>& representatives() const { return q_.representatives(); }
    std::vector<Chain> representative_chains() const;
    std::vector<Cochain> representative_cochains() const;

    // Class of a (co)cycle in generator coordinates; nullopt off the kernel.
    std::optional<ModVec> reduce(const ModVec& v) const { return q_.reduce(v); }
    std::optional<ModVec> reduce_chain(const Chain& k) const;
    std::optional<ModVec> reduce_cochain(const Cochain& phi) const;

    std::string factor_string() const;

  private:
    FiniteAbelianGroup G_;
    int n_;
    bool co_;
    QuotientStructure q_;
};

HomologyStructure homology(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);
HomologyStructure cohomology(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);

// Homomorphism between two homology groups in generator coordinates.
struct InducedMap {
    std::vector<std::int64_t> src_factors, dst_factors;
    std::vector<ModVec> col;
    ModVec apply(const ModVec& x) const;
    ModMap as_map() const;
};

// Induced map sending each source generator through `push` and reducing in
// the destination.  `push` must send cycles to cycles.
InducedMap induced_map(const HomologyStructure& h_src, const HomologyStructure& h_dst,
                       const std::function<Chain(const Chain&)>& push);

// Inclusion of a subcomplex into its parent.
InducedMap induced_inclusion(const Subcomplex& sub, const HomologyStructure& h_sub,
                             const HomologyStructure& h_parent);

// Mayer-Vietoris coupling of a bipartition at degree p.  S collects the pairs
// (i_A*[z], -i_B*[z]) inside H_p(A) + H_p(B); the factorization criterion
// demands that S be the graph of an isomorphism between the two images, i.e.
// that S meet neither summand except in zero.
struct MvResult {
    bool holds = false;
    std::vector<std::int64_t> h_ab_factors, h_a_factors, h_b_factors;
    std::int64_t s_order = 1;
    std::int64_t left_overlap_order = 1;   // |S cap (H_A + 0)|
    std::int64_t right_overlap_order = 1;  // |S cap (0 + H_B)|
    bool projections_match = true;         // proj_A(S) = Im(i_A*), proj_B(S) = Im(-i_B*)
    std::string summary() const;
};

MvResult mv_criterion(const Bipartition& cut, const FiniteAbelianGroup& G);

}  // namespace hfent
