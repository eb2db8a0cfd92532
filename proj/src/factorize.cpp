#include "hfent/factorize.hpp"

#include <utility>

namespace hfent {

namespace {

MvResult checked_mv(const Bipartition& cut, const FiniteAbelianGroup& G) {
    MvResult mv = mv_criterion(cut, G);
    if (!mv.holds)
        throw domain_error("factorization refused, the Mayer-Vietoris criterion fails: " +
                           mv.summary());
    return mv;
}

bool char_is_zero(const Character& c) {
    for (std::int64_t r : c.res)
        if (r != 0) return false;
    return true;
}

ModVec vec_neg(const ModVec& v, const ModVec& moduli) {
    ModVec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] == 0 ? 0 : moduli[i] - v[i];
    return out;
}

}  // namespace

FactorizationData::FactorizationData(const HilbertModel& m, Bipartition cut)
    : m_(m),
      cut_(std::move(cut)),
      mv_(checked_mv(cut_, m.group())),
      p_(cut_.p),
      hA_(cut_.A.complex(), m.group(), p_, false),
      hB_(cut_.B.complex(), m.group(), p_, false),
      hAB_(cut_.AB.complex(), m.group(), p_, false),
      iA_(induced_map(hAB_, hA_,
                      [&](const Chain& z) {
                          return cut_.A.restrict_chain(m.group(), cut_.AB.push_chain(m.group(), z));
                      })),
      miB_(induced_map(hAB_, hB_,
                       [&](const Chain& z) {
                           return neg(m.group(), cut_.B.restrict_chain(
                                                     m.group(), cut_.AB.push_chain(m.group(), z)));
                       })),
      iA_map_(iA_.as_map()),
      miB_map_(miB_.as_map()),
      b_pm1_ab_(p_ >= 1 ? boundaries(cut_.AB.complex(), m.group(), p_ - 1)
                        : SubgroupModM::zero(ModVec{})) {
    if (cut_.p != m.p())
        throw domain_error("factorize: the cut degree must match the model degree");
    build_h_table();

    const FiniteAbelianGroup& G = m.group();
    const std::int64_t pd = m_.p_dim();
    std::vector<std::optional<ModVec>> f1v(static_cast<std::size_t>(pd));
    std::vector<std::optional<ModVec>> f2v(static_cast<std::size_t>(pd));
    std::vector<unsigned char> is_a(static_cast<std::size_t>(m_.complex().count(p_)), 0);
    for (int s : cut_.A_psimplices) is_a[static_cast<std::size_t>(s)] = 1;
    for (std::int64_t pi = 0; pi < pd; ++pi) {
        Chain k = m_.char_chain(pi);
        Chain kA = k, kAc = k;
        for (std::size_t s = 0; s < k.coef.size(); ++s)
            (is_a[s] ? kAc : kA).coef[s] = G.zero_char();
        const auto F1 = regional_preimage(cut_.A.restrict_chain(G, kA), true);
        if (F1) f1v[static_cast<std::size_t>(pi)] = chain_to_vec(G, cut_.A.push_chain(G, *F1));
        const auto F2 = regional_preimage(cut_.B.restrict_chain(G, kAc), false);
        if (F2) f2v[static_cast<std::size_t>(pi)] = chain_to_vec(G, cut_.B.push_chain(G, *F2));
    }
    UA_ = coupling_from_sector_chains(m_, f1v);
    UAc_ = coupling_from_sector_chains(m_, f2v);
    check_invariants();
}

void FactorizationData::build_h_table() {
    if (p_ == 0) return;
    const FiniteAbelianGroup& G = m_.group();
    const DeltaComplex& ab = cut_.AB.complex();
    if (b_pm1_ab_.order() > (1 << 16))
        throw capability_error("factorize: the intersection boundary group is too large to tabulate");
    const ModMap del = boundary_map(ab, G, p_);
    ModMap twice;
    twice.src_moduli = del.src_moduli;
    twice.dst_moduli = del.src_moduli;
    twice.col.assign(del.src_moduli.size(), ModVec(del.src_moduli.size(), 0));
    for (std::size_t i = 0; i < del.src_moduli.size(); ++i)
        twice.col[i][i] = 2 % del.src_moduli[i];
    for (std::int64_t n = 0; n < b_pm1_ab_.order(); ++n) {
        const ModVec x = b_pm1_ab_.element_at(n);
        if (h_table_.count(x)) continue;
        const ModVec nx = vec_neg(x, b_pm1_ab_.moduli());
        std::optional<ModVec> u;
        if (nx == x)
            // Self-inverse boundary: the preimage must be 2-torsion to keep h odd.
            u = solve_stacked({del, twice}, {x, ModVec(del.src_moduli.size(), 0)});
        else
            u = solve(del, x);
        if (!u)
            throw capability_error("factorize: no odd preimage choice exists for an "
                                   "intersection boundary");
        h_table_.emplace(x, *u);
        if (nx != x) h_table_.emplace(nx, vec_neg(*u, del.src_moduli));
    }
}

Chain FactorizationData::h(const Chain& x) const {
    const FiniteAbelianGroup& G = m_.group();
    if (p_ == 0) return zero_chain(cut_.AB.complex(), G, 0);
    if (x.dim != p_ - 1 || static_cast<int>(x.coef.size()) != cut_.AB.complex().count(p_ - 1))
        throw domain_error("h: expected an intersection (p-1)-chain");
    const auto it = h_table_.find(chain_to_vec(G, x));
    if (it == h_table_.end())
        throw domain_error("h: the chain is not an intersection boundary");
    return vec_to_chain(G, p_, it->second);
}

const FactorizationData::TEntry& FactorizationData::t_from_A(const ModVec& alpha) const {
    const auto it = tA_cache_.find(alpha);
    if (it != tA_cache_.end()) return it->second;
    TEntry e;
    if (const auto c = solve(iA_map_, alpha)) {
        e.in_image = true;
        e.other = miB_map_.apply(*c);
        const ModVec moduli = chain_moduli(cut_.AB.complex(), m_.group(), p_);
        ModVec z(moduli.size(), 0);
        for (std::size_t t = 0; t < hAB_.representatives().size(); ++t) {
            const std::int64_t ct = (*c)[t];
            if (ct == 0) continue;
            const ModVec& rep = hAB_.representatives()[t];
            for (std::size_t i = 0; i < z.size(); ++i) z[i] = (z[i] + ct * rep[i]) % moduli[i];
        }
        e.z = vec_to_chain(m_.group(), p_, z);
    }
    return tA_cache_.emplace(alpha, std::move(e)).first->second;
}

const FactorizationData::TEntry& FactorizationData::t_from_B(const ModVec& beta) const {
    const auto it = tB_cache_.find(beta);
    if (it != tB_cache_.end()) return it->second;
    TEntry e;
    if (const auto c = solve(miB_map_, beta)) {
        // Route through the A side so matched classes share one cycle.
        const ModVec alpha = iA_map_.apply(*c);
        const TEntry& ea = t_from_A(alpha);
        e.in_image = true;
        e.z = ea.z;
        e.other = alpha;
    }
    return tB_cache_.emplace(beta, std::move(e)).first->second;
}

Chain FactorizationData::t_A(const ModVec& alpha) const {
    const TEntry& e = t_from_A(alpha);
    if (!e.in_image) throw domain_error("t_A: class outside the image of the inclusion");
    return e.z;
}

Chain FactorizationData::t_B(const ModVec& beta) const {
    const TEntry& e = t_from_B(beta);
    if (!e.in_image) throw domain_error("t_B: class outside the image of the inclusion");
    return e.z;
}

Chain FactorizationData::l_A(const Chain& bdry) const {
    auto u = boundary_preimage(cut_.A.complex(), m_.group(), bdry);
    if (!u) throw domain_error("l_A: not a boundary inside the region");
    return *u;
}

Chain FactorizationData::l_B(const Chain& bdry) const {
    auto u = boundary_preimage(cut_.B.complex(), m_.group(), bdry);
    if (!u) throw domain_error("l_B: not a boundary inside the region");
    return *u;
}

std::optional<Chain> FactorizationData::regional_preimage(const Chain& k, bool side_A) const {
    const FiniteAbelianGroup& G = m_.group();
    const Subcomplex& R = side_A ? cut_.A : cut_.B;
    const HomologyStructure& hR = side_A ? hA_ : hB_;
    if (k.dim != p_ || static_cast<int>(k.coef.size()) != R.complex().count(p_))
        throw domain_error("regional preimage: expected a region-local p-chain");
    Chain w = k;
    if (p_ >= 1) {
        const Chain dk_parent = R.push_chain(G, boundary(R.complex(), G, k));
        for (std::size_t s = 0; s < dk_parent.coef.size(); ++s)
            if (!char_is_zero(dk_parent.coef[s]) &&
                !cut_.AB.contains(p_ - 1, static_cast<int>(s)))
                return std::nullopt;
        const Chain x = cut_.AB.restrict_chain(G, dk_parent);
        const auto it = h_table_.find(chain_to_vec(G, x));
        if (it == h_table_.end()) return std::nullopt;  // del k outside B_{p-1}(A cap B)
        const Chain h_r = R.restrict_chain(G, cut_.AB.push_chain(G, vec_to_chain(G, p_, it->second)));
        w = sub(G, k, h_r);
    }
    const auto cls = hR.reduce_chain(w);
    if (!cls) throw structural_error("regional preimage: chain failed to close");
    const TEntry& te = side_A ? t_from_A(*cls) : t_from_B(*cls);
    if (!te.in_image) return std::nullopt;
    const Chain t_r = R.restrict_chain(G, cut_.AB.push_chain(G, te.z));
    const Chain arg = side_A ? sub(G, w, t_r) : add(G, w, t_r);
    auto pre = boundary_preimage(R.complex(), G, arg);
    if (!pre) throw structural_error("regional preimage: matched class failed to bound");
    return pre;
}

std::optional<Chain> FactorizationData::f1(const Chain& k_A) const {
    return regional_preimage(k_A, true);
}

std::optional<Chain> FactorizationData::f2(const Chain& k_Ac) const {
    return regional_preimage(k_Ac, false);
}

double FactorizationData::residual() const {
    const DiagOp pinv = projector_inv(m_);
    return (minimal_coupling(m_) * pinv).norm_diff(product() * pinv);
}

void FactorizationData::check_invariants() const {
    const FiniteAbelianGroup& G = m_.group();
    if (p_ >= 1) {
        for (const auto& [x, u] : h_table_) {
            const Chain du = boundary(cut_.AB.complex(), G, vec_to_chain(G, p_, u));
            if (chain_to_vec(G, du) != x)
                throw structural_error("factorize: h is not a boundary section");
            const auto odd = h_table_.find(vec_neg(x, b_pm1_ab_.moduli()));
            if (odd == h_table_.end() || odd->second != vec_neg(u, chain_moduli(cut_.AB.complex(), G, p_)))
                throw structural_error("factorize: h is not odd");
        }
    }
    // del(f1 + f2) = k across B_p(X), exhaustively when small.
    const SubgroupModM bp = boundaries(m_.complex(), G, p_);
    const std::int64_t total = bp.order();
    const std::int64_t step = total <= 256 ? 1 : total / 256;
    std::vector<unsigned char> is_a(static_cast<std::size_t>(m_.complex().count(p_)), 0);
    for (int s : cut_.A_psimplices) is_a[static_cast<std::size_t>(s)] = 1;
    for (std::int64_t n = 0; n < total; n += step) {
        const Chain k = vec_to_chain(G, p_, bp.element_at(n));
        Chain kA = k, kAc = k;
        for (std::size_t s = 0; s < k.coef.size(); ++s)
            (is_a[s] ? kAc : kA).coef[s] = G.zero_char();
        const auto F1 = regional_preimage(cut_.A.restrict_chain(G, kA), true);
        const auto F2 = regional_preimage(cut_.B.restrict_chain(G, kAc), false);
        if (!F1 || !F2)
            throw structural_error("factorize: a global boundary escaped the regional domains");
        const Chain glue =
            add(G, cut_.A.push_chain(G, *F1), cut_.B.push_chain(G, *F2));
        if (chain_to_vec(G, boundary(m_.complex(), G, glue)) != chain_to_vec(G, k))
            throw structural_error("factorize: regional preimages fail to glue");
    }
}

FactorizationData factorize(const HilbertModel& m, const Bipartition& cut) {
    return FactorizationData(m, cut);
}

}  // namespace hfent
