#include "hfent/operators.hpp"

#include <algorithm>
#include <utility>

namespace hfent {

namespace {

std::int64_t mod_pos(std::int64_t v, std::int64_t m) {
    v %= m;
    return v < 0 ? v + m : v;
}

void check_p_cochain(const HilbertModel& m, const Cochain& phi, const char* what) {
    if (phi.dim != m.p() || static_cast<int>(phi.val.size()) != m.complex().count(m.p()))
        throw domain_error(std::string(what) + ": expected a p-cochain on the model complex");
}

void check_p1_chain(const HilbertModel& m, const Chain& k, const char* what) {
    if (k.dim != m.p() + 1 || static_cast<int>(k.coef.size()) != m.complex().count(m.p() + 1))
        throw domain_error(std::string(what) + ": expected a (p+1)-chain on the model complex");
}

// <k', gamma(p1 config)> for every gauge configuration, via per-site phase
// tables and a mixed-radix sweep (site 0 most significant, matching p1_index).
std::vector<Angle> gauge_phases_for_chain(const HilbertModel& m, const ModVec& kp) {
    const FiniteAbelianGroup& G = m.group();
    const int r = G.rank();
    const int ns = m.n_p1_sites();
    std::vector<std::vector<Angle>> table(static_cast<std::size_t>(ns));
    for (int j = 0; j < ns; ++j) {
        const SiteSpecP1& site = m.p1_site(j);
        Character c;
        c.res.assign(kp.begin() + static_cast<std::ptrdiff_t>(site.simplex) * r,
                     kp.begin() + static_cast<std::ptrdiff_t>(site.simplex + 1) * r);
        table[static_cast<std::size_t>(j)].reserve(site.basis.size());
        for (const GroupElement& g : site.basis)
            table[static_cast<std::size_t>(j)].push_back(G.eval(c, g));
    }
    std::vector<Angle> out(static_cast<std::size_t>(m.p1_dim()));
    std::vector<int> lab(static_cast<std::size_t>(ns), 0);
    for (std::int64_t i = 0; i < m.p1_dim(); ++i) {
        Angle a;
        for (int j = 0; j < ns; ++j)
            a = a + table[static_cast<std::size_t>(j)][static_cast<std::size_t>(lab[static_cast<std::size_t>(j)])];
        out[static_cast<std::size_t>(i)] = a;
        for (int j = ns - 1; j >= 0; --j) {
            auto& l = lab[static_cast<std::size_t>(j)];
            if (++l < static_cast<int>(m.p1_site(j).basis.size())) break;
            l = 0;
        }
    }
    return out;
}

// <k(p config), phi> for every charge configuration; mirror of the above.
std::vector<Angle> matter_phases_for_cochain(const HilbertModel& m, const ModVec& phi) {
    const FiniteAbelianGroup& G = m.group();
    const int r = G.rank();
    const int ns = m.n_p_sites();
    std::vector<std::vector<Angle>> table(static_cast<std::size_t>(ns));
    for (int j = 0; j < ns; ++j) {
        const SiteSpecP& site = m.p_site(j);
        GroupElement g;
        g.res.assign(phi.begin() + static_cast<std::ptrdiff_t>(site.simplex) * r,
                     phi.begin() + static_cast<std::ptrdiff_t>(site.simplex + 1) * r);
        table[static_cast<std::size_t>(j)].reserve(site.basis.size());
        for (const Character& c : site.basis)
            table[static_cast<std::size_t>(j)].push_back(G.eval(c, g));
    }
    std::vector<Angle> out(static_cast<std::size_t>(m.p_dim()));
    std::vector<int> lab(static_cast<std::size_t>(ns), 0);
    for (std::int64_t i = 0; i < m.p_dim(); ++i) {
        Angle a;
        for (int j = 0; j < ns; ++j)
            a = a + table[static_cast<std::size_t>(j)][static_cast<std::size_t>(lab[static_cast<std::size_t>(j)])];
        out[static_cast<std::size_t>(i)] = a;
        for (int j = ns - 1; j >= 0; --j) {
            auto& l = lab[static_cast<std::size_t>(j)];
            if (++l < static_cast<int>(m.p_site(j).basis.size())) break;
            l = 0;
        }
    }
    return out;
}

DiagOp broadcast_p(const HilbertModel& m, const std::vector<unsigned char>& keep,
                   const std::vector<Angle>& ph) {
    DiagOp d;
    d.keep.resize(static_cast<std::size_t>(m.dim()));
    d.ph.resize(static_cast<std::size_t>(m.dim()));
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi) {
        const std::int64_t base = pi * m.p1_dim();
        for (std::int64_t j = 0; j < m.p1_dim(); ++j) {
            d.keep[static_cast<std::size_t>(base + j)] = keep[static_cast<std::size_t>(pi)];
            d.ph[static_cast<std::size_t>(base + j)] = ph[static_cast<std::size_t>(pi)];
        }
    }
    return d;
}

DiagOp broadcast_p1(const HilbertModel& m, const std::vector<unsigned char>& keep,
                    const std::vector<Angle>& ph) {
    DiagOp d;
    d.keep.resize(static_cast<std::size_t>(m.dim()));
    d.ph.resize(static_cast<std::size_t>(m.dim()));
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi) {
        const std::int64_t base = pi * m.p1_dim();
        for (std::int64_t j = 0; j < m.p1_dim(); ++j) {
            d.keep[static_cast<std::size_t>(base + j)] = keep[static_cast<std::size_t>(j)];
            d.ph[static_cast<std::size_t>(base + j)] = ph[static_cast<std::size_t>(j)];
        }
    }
    return d;
}

}  // namespace

DiagOp coupling_from_sector_chains(const HilbertModel& m,
                                   const std::vector<std::optional<ModVec>>& kp) {
    DiagOp d;
    d.keep.assign(static_cast<std::size_t>(m.dim()), 0);
    d.ph.assign(static_cast<std::size_t>(m.dim()), Angle{});
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi) {
        const auto& sector = kp[static_cast<std::size_t>(pi)];
        if (!sector) continue;
        const std::vector<Angle> ph = gauge_phases_for_chain(m, *sector);
        const std::int64_t base = pi * m.p1_dim();
        for (std::int64_t j = 0; j < m.p1_dim(); ++j) {
            d.keep[static_cast<std::size_t>(base + j)] = 1;
            d.ph[static_cast<std::size_t>(base + j)] = ph[static_cast<std::size_t>(j)];
        }
    }
    return d;
}

namespace {

ModVec vec_sub(const ModVec& a, const ModVec& b, const ModVec& moduli) {
    ModVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = mod_pos(a[i] - b[i], moduli[i]);
    return out;
}

}  // namespace

DiagOp matter_phase(const HilbertModel& m, const Cochain& phi) {
    check_p_cochain(m, phi, "matter_phase");
    const std::vector<Angle> ph = matter_phases_for_cochain(m, cochain_to_vec(m.group(), phi));
    return broadcast_p(m, std::vector<unsigned char>(static_cast<std::size_t>(m.p_dim()), 1), ph);
}

DiagOp sym_op(const HilbertModel& m, const Cochain& phi) {
    check_p_cochain(m, phi, "sym_op");
    if (!is_zero(coboundary(m.complex(), m.group(), phi)))
        throw domain_error("sym_op: the labeling cochain must be closed (delta phi = 0)");
    return matter_phase(m, phi);
}

DiagOp wilson_op(const HilbertModel& m, const Chain& kp) {
    check_p1_chain(m, kp, "wilson_op");
    const std::vector<Angle> ph = gauge_phases_for_chain(m, chain_to_vec(m.group(), kp));
    return broadcast_p1(m, std::vector<unsigned char>(static_cast<std::size_t>(m.p1_dim()), 1), ph);
}

DiagOp sym_op_dual(const HilbertModel& m, const Chain& k) {
    check_p1_chain(m, k, "sym_op_dual");
    if (!is_zero(boundary(m.complex(), m.group(), k)))
        throw domain_error("sym_op_dual: the labeling chain must be a cycle (del k = 0)");
    return wilson_op(m, k);
}

PermOp thooft_op(const HilbertModel& m, const Cochain& phip) {
    if (phip.dim != m.p() + 1 ||
        static_cast<int>(phip.val.size()) != m.complex().count(m.p() + 1))
        throw domain_error("thooft_op: expected a (p+1)-cochain on the model complex");
    const FiniteAbelianGroup& G = m.group();
    const int ns = m.n_p1_sites();
    for (int j = 0; j < ns; ++j)
        if (!m.p1_site(j).regular)
            throw capability_error("thooft_op needs regular group bases on every gauge site");
    // Shifted label per site; left action g -> phi'(sigma) + g.
    std::vector<std::vector<int>> shift(static_cast<std::size_t>(ns));
    for (int j = 0; j < ns; ++j) {
        const SiteSpecP1& site = m.p1_site(j);
        auto& s = shift[static_cast<std::size_t>(j)];
        s.reserve(site.basis.size());
        for (const GroupElement& g : site.basis)
            s.push_back(static_cast<int>(
                G.index_of(G.add(phip.val[static_cast<std::size_t>(site.simplex)], g))));
    }
    std::vector<std::int64_t> dstp1(static_cast<std::size_t>(m.p1_dim()));
    std::vector<int> lab, dst_lab(static_cast<std::size_t>(ns));
    for (std::int64_t i = 0; i < m.p1_dim(); ++i) {
        m.p1_labels(i, lab);
        for (int j = 0; j < ns; ++j)
            dst_lab[static_cast<std::size_t>(j)] =
                shift[static_cast<std::size_t>(j)][static_cast<std::size_t>(lab[static_cast<std::size_t>(j)])];
        dstp1[static_cast<std::size_t>(i)] = m.p1_index_of(dst_lab);
    }
    PermOp t = PermOp::identity(m.dim());
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi)
        for (std::int64_t j = 0; j < m.p1_dim(); ++j)
            t.dst[static_cast<std::size_t>(m.global_index(pi, j))] =
                m.global_index(pi, dstp1[static_cast<std::size_t>(j)]);
    return t;
}

DiagOp projector_P(const HilbertModel& m, const Chain& k) {
    if (k.dim != m.p() || static_cast<int>(k.coef.size()) != m.complex().count(m.p()))
        throw domain_error("projector_P: expected a p-chain on the model complex");
    const ModVec target = chain_to_vec(m.group(), k);
    std::vector<unsigned char> keep(static_cast<std::size_t>(m.p_dim()), 0);
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi)
        if (m.char_vec(pi) == target) keep[static_cast<std::size_t>(pi)] = 1;
    return broadcast_p(m, keep, std::vector<Angle>(static_cast<std::size_t>(m.p_dim())));
}

DiagOp projector_Ptilde(const HilbertModel& m, const Cochain& phip) {
    if (phip.dim != m.p() + 1 ||
        static_cast<int>(phip.val.size()) != m.complex().count(m.p() + 1))
        throw domain_error("projector_Ptilde: expected a (p+1)-cochain on the model complex");
    const ModVec target = cochain_to_vec(m.group(), phip);
    std::vector<unsigned char> keep(static_cast<std::size_t>(m.p1_dim()), 0);
    for (std::int64_t j = 0; j < m.p1_dim(); ++j)
        if (m.group_vec(j) == target) keep[static_cast<std::size_t>(j)] = 1;
    return broadcast_p1(m, keep, std::vector<Angle>(static_cast<std::size_t>(m.p1_dim())));
}

DiagOp projector_sym(const HilbertModel& m) {
    const SubgroupModM B = boundaries(m.complex(), m.group(), m.p());
    std::vector<unsigned char> keep(static_cast<std::size_t>(m.p_dim()), 0);
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi)
        if (B.contains(m.char_vec(pi))) keep[static_cast<std::size_t>(pi)] = 1;
    return broadcast_p(m, keep, std::vector<Angle>(static_cast<std::size_t>(m.p_dim())));
}

DiagOp projector_sym_dual(const HilbertModel& m) {
    const SubgroupModM B = coboundaries(m.complex(), m.group(), m.p() + 1);
    std::vector<unsigned char> keep(static_cast<std::size_t>(m.p1_dim()), 0);
    for (std::int64_t j = 0; j < m.p1_dim(); ++j)
        if (B.contains(m.group_vec(j))) keep[static_cast<std::size_t>(j)] = 1;
    return broadcast_p1(m, keep, std::vector<Angle>(static_cast<std::size_t>(m.p1_dim())));
}

DiagOp projector_inv(const HilbertModel& m) { return projector_sym(m) * projector_sym_dual(m); }

namespace {

Angle coord_pairing(const ModVec& moduli, const ModVec& a, const ModVec& b) {
    Angle s;
    for (std::size_t i = 0; i < moduli.size(); ++i)
        s = s + Angle::turns(a[i] * b[i], moduli[i]);
    return s;
}

}  // namespace

DiagOp projector_fixed_matter(const HilbertModel& m) {
    const SubgroupModM Z = cocycles(m.complex(), m.group(), m.p());
    std::vector<unsigned char> keep(static_cast<std::size_t>(m.p_dim()), 0);
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi) {
        const ModVec k = m.char_vec(pi);
        bool fixed = true;
        for (const ModVec& row : Z.rows())
            if (!coord_pairing(Z.moduli(), k, row).is_zero()) {
                fixed = false;
                break;
            }
        keep[static_cast<std::size_t>(pi)] = fixed ? 1 : 0;
    }
    return broadcast_p(m, keep, std::vector<Angle>(static_cast<std::size_t>(m.p_dim())));
}

DiagOp projector_fixed_gauge(const HilbertModel& m) {
    const SubgroupModM Z = cycles(m.complex(), m.group(), m.p() + 1);
    std::vector<unsigned char> keep(static_cast<std::size_t>(m.p1_dim()), 0);
    for (std::int64_t j = 0; j < m.p1_dim(); ++j) {
        const ModVec g = m.group_vec(j);
        bool fixed = true;
        for (const ModVec& row : Z.rows())
            if (!coord_pairing(Z.moduli(), row, g).is_zero()) {
                fixed = false;
                break;
            }
        keep[static_cast<std::size_t>(j)] = fixed ? 1 : 0;
    }
    return broadcast_p1(m, keep, std::vector<Angle>(static_cast<std::size_t>(m.p1_dim())));
}

ChargeSector charge_sector(const HilbertModel& m, const Chain& k) {
    if (k.dim != m.p() || static_cast<int>(k.coef.size()) != m.complex().count(m.p()))
        throw domain_error("charge_sector: expected a p-chain on the model complex");
    const ModVec moduli = chain_moduli(m.complex(), m.group(), m.p());
    QuotientStructure q(SubgroupModM::full(moduli), boundaries(m.complex(), m.group(), m.p()));
    ChargeSector out;
    out.sector = *q.reduce(chain_to_vec(m.group(), k));
    out.sector_factors = q.factors();
    if (is_zero(boundary(m.complex(), m.group(), k))) {
        const HomologyStructure h = homology(m.complex(), m.group(), m.p());
        out.homology_class = h.reduce_chain(k);
        out.homology_factors = h.factors();
    }
    return out;
}

BoundarySection::BoundarySection(const DeltaComplex& X, const FiniteAbelianGroup& G, int p)
    : B_(boundaries(X, G, p)), Q_(B_, SubgroupModM::zero(chain_moduli(X, G, p))) {
    const ModMap del = boundary_map(X, G, p + 1);
    src_moduli_ = del.src_moduli;
    const std::size_t n = src_moduli_.size();
    for (std::size_t t = 0; t < Q_.factors().size(); ++t) {
        // With f_t * u_t = 0 the digit-sum preimage is a homomorphism on B_p.
        ModMap scale;
        scale.src_moduli = src_moduli_;
        scale.dst_moduli = src_moduli_;
        scale.col.assign(n, ModVec(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            scale.col[i][i] = mod_pos(Q_.factors()[t], src_moduli_[i]);
        auto u = solve_stacked({del, scale}, {Q_.representatives()[t], ModVec(n, 0)});
        if (!u)
            throw capability_error(
                "minimal coupling: no homomorphic preimage section of the boundary map exists "
                "for this complex/group");
        u_.push_back(*u);
    }
}

std::optional<ModVec> BoundarySection::apply(const ModVec& k) const {
    const auto a = Q_.reduce(k);
    if (!a) return std::nullopt;
    ModVec out(src_moduli_.size(), 0);
    for (std::size_t t = 0; t < u_.size(); ++t) {
        const std::int64_t c = (*a)[t];
        if (c == 0) continue;
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = mod_pos(out[i] + c * u_[t][i], src_moduli_[i]);
    }
    return out;
}

CoboundarySection::CoboundarySection(const DeltaComplex& X, const FiniteAbelianGroup& G, int p)
    : B_(coboundaries(X, G, p + 1)), Q_(B_, SubgroupModM::zero(chain_moduli(X, G, p + 1))) {
    const ModMap delta = coboundary_map(X, G, p);
    src_moduli_ = delta.src_moduli;
    const std::size_t n = src_moduli_.size();
    for (std::size_t t = 0; t < Q_.factors().size(); ++t) {
        ModMap scale;
        scale.src_moduli = src_moduli_;
        scale.dst_moduli = src_moduli_;
        scale.col.assign(n, ModVec(n, 0));
        for (std::size_t i = 0; i < n; ++i)
            scale.col[i][i] = mod_pos(Q_.factors()[t], src_moduli_[i]);
        auto u = solve_stacked({delta, scale}, {Q_.representatives()[t], ModVec(n, 0)});
        if (!u)
            throw capability_error(
                "dual coupling: no homomorphic preimage section of the coboundary map exists "
                "for this complex/group");
        u_.push_back(*u);
    }
}

std::optional<ModVec> CoboundarySection::apply(const ModVec& phip) const {
    const auto a = Q_.reduce(phip);
    if (!a) return std::nullopt;
    ModVec out(src_moduli_.size(), 0);
    for (std::size_t t = 0; t < u_.size(); ++t) {
        const std::int64_t c = (*a)[t];
        if (c == 0) continue;
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = mod_pos(out[i] + c * u_[t][i], src_moduli_[i]);
    }
    return out;
}

DiagOp minimal_coupling(const HilbertModel& m) {
    const BoundarySection sec(m.complex(), m.group(), m.p());
    std::vector<std::optional<ModVec>> kp(static_cast<std::size_t>(m.p_dim()));
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi)
        kp[static_cast<std::size_t>(pi)] = sec.apply(m.char_vec(pi));
    return coupling_from_sector_chains(m, kp);
}

DiagOp minimal_coupling_shifted(const HilbertModel& m, const Chain& z) {
    check_p1_chain(m, z, "minimal_coupling_shifted");
    if (!is_zero(boundary(m.complex(), m.group(), z)))
        throw domain_error("minimal_coupling_shifted: the preimage shift must be a cycle");
    const BoundarySection sec(m.complex(), m.group(), m.p());
    const ModVec zv = chain_to_vec(m.group(), z);
    const ModVec moduli = chain_moduli(m.complex(), m.group(), m.p() + 1);
    std::vector<std::optional<ModVec>> kp(static_cast<std::size_t>(m.p_dim()));
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi) {
        auto u = sec.apply(m.char_vec(pi));
        if (!u) continue;
        ModVec shifted(u->size());
        for (std::size_t i = 0; i < u->size(); ++i)
            shifted[i] = mod_pos((*u)[i] + zv[i], moduli[i]);
        kp[static_cast<std::size_t>(pi)] = std::move(shifted);
    }
    return coupling_from_sector_chains(m, kp);
}

DiagOp dual_coupling(const HilbertModel& m) {
    const CoboundarySection sec(m.complex(), m.group(), m.p());
    DiagOp d;
    d.keep.assign(static_cast<std::size_t>(m.dim()), 0);
    d.ph.assign(static_cast<std::size_t>(m.dim()), Angle{});
    for (std::int64_t j = 0; j < m.p1_dim(); ++j) {
        const auto phi = sec.apply(m.group_vec(j));
        if (!phi) continue;
        const std::vector<Angle> ph = matter_phases_for_cochain(m, *phi);
        for (std::int64_t pi = 0; pi < m.p_dim(); ++pi) {
            const std::int64_t g = m.global_index(pi, j);
            d.keep[static_cast<std::size_t>(g)] = 1;
            d.ph[static_cast<std::size_t>(g)] = ph[static_cast<std::size_t>(pi)];
        }
    }
    return d;
}

SparseOp conjugate_direct(const HilbertModel& m, const SparseOp& O_p) {
    if (O_p.rows() != m.p_dim() || O_p.cols() != m.p_dim())
        throw domain_error("conjugate: operator must act on the matter register");
    const DiagOp U = minimal_coupling(m);
    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    trip.reserve(static_cast<std::size_t>(O_p.nonZeros()) * static_cast<std::size_t>(m.p1_dim()));
    for (int c = 0; c < O_p.outerSize(); ++c)
        for (SparseOp::InnerIterator it(O_p, c); it; ++it) {
            const std::int64_t pr = it.row(), pc = it.col();
            for (std::int64_t j = 0; j < m.p1_dim(); ++j) {
                const std::int64_t gr = m.global_index(pr, j), gc = m.global_index(pc, j);
                if (!U.keep[static_cast<std::size_t>(gr)] || !U.keep[static_cast<std::size_t>(gc)])
                    continue;
                const Angle ph = U.ph[static_cast<std::size_t>(gr)] - U.ph[static_cast<std::size_t>(gc)];
                trip.emplace_back(static_cast<int>(gr), static_cast<int>(gc),
                                  it.value() * ph.unit());
            }
        }
    SparseOp out(m.dim(), m.dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SparseOp conjugate_decomposed(const HilbertModel& m, const SparseOp& O_p) {
    if (O_p.rows() != m.p_dim() || O_p.cols() != m.p_dim())
        throw domain_error("conjugate: operator must act on the matter register");
    const BoundarySection sec(m.complex(), m.group(), m.p());
    const ModVec moduli = chain_moduli(m.complex(), m.group(), m.p());
    // Cache: charge shift q -> gauge phases of <q', gamma>, or annihilated.
    std::map<ModVec, std::optional<std::vector<Angle>>> cache;
    std::vector<signed char> in_b(static_cast<std::size_t>(m.p_dim()), -1);
    const auto member = [&](std::int64_t pi) {
        auto& f = in_b[static_cast<std::size_t>(pi)];
        if (f < 0) f = sec.contains(m.char_vec(pi)) ? 1 : 0;
        return f == 1;
    };
    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    for (int c = 0; c < O_p.outerSize(); ++c)
        for (SparseOp::InnerIterator it(O_p, c); it; ++it) {
            const std::int64_t pr = it.row(), pc = it.col();
            if (!member(pc)) continue;  // right-hand sum over P(k), k in B_p
            const ModVec q = vec_sub(m.char_vec(pr), m.char_vec(pc), moduli);
            auto found = cache.find(q);
            if (found == cache.end()) {
                std::optional<std::vector<Angle>> ph;
                if (auto qp = sec.apply(q)) ph = gauge_phases_for_chain(m, *qp);
                found = cache.emplace(q, std::move(ph)).first;
            }
            if (!found->second) continue;  // q not in B_p: component is projected out
            const std::vector<Angle>& ph = *found->second;
            for (std::int64_t j = 0; j < m.p1_dim(); ++j)
                trip.emplace_back(static_cast<int>(m.global_index(pr, j)),
                                  static_cast<int>(m.global_index(pc, j)),
                                  it.value() * ph[static_cast<std::size_t>(j)].unit());
        }
    SparseOp out(m.dim(), m.dim());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SparseOp conjugate(const HilbertModel& m, const SparseOp& O_p) { return conjugate_direct(m, O_p); }

std::map<ModVec, SparseOp> decompose_components(const HilbertModel& m, const SparseOp& O_p) {
    if (O_p.rows() != m.p_dim() || O_p.cols() != m.p_dim())
        throw domain_error("decompose_components: operator must act on the matter register");
    const ModVec moduli = chain_moduli(m.complex(), m.group(), m.p());
    std::map<ModVec, std::vector<Eigen::Triplet<std::complex<double>>>> buckets;
    for (int c = 0; c < O_p.outerSize(); ++c)
        for (SparseOp::InnerIterator it(O_p, c); it; ++it) {
            const ModVec q = vec_sub(m.char_vec(it.row()), m.char_vec(it.col()), moduli);
            buckets[q].emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                                    it.value());
        }
    std::map<ModVec, SparseOp> out;
    for (auto& [q, trip] : buckets) {
        SparseOp o(m.p_dim(), m.p_dim());
        o.setFromTriplets(trip.begin(), trip.end());
        out.emplace(q, std::move(o));
    }
    return out;
}

PermOp gauge_transformation(const HilbertModel& m, const Cochain& phi) {
    check_p_cochain(m, phi, "gauge_transformation");
    return compose(matter_phase(m, phi), thooft_op(m, coboundary(m.complex(), m.group(), phi)));
}

namespace {

// Everything the gauging sum needs from one phi: the matter phases <k, phi>
// and the destination gauge configuration id + delta phi.
struct GaugeSweep {
    const HilbertModel& m;
    std::int64_t total;

    explicit GaugeSweep(const HilbertModel& m_, std::int64_t enum_cap) : m(m_) {
        if (!m.all_regular())
            throw capability_error("gauging maps need regular group bases on every gauge site");
        const std::int64_t ord = m.group().order();
        const int np = m.complex().count(m.p());
        total = 1;
        for (int i = 0; i < np; ++i) {
            if (total > enum_cap / ord)
                throw capability_error("gauging map: |G|^(#p-simplices) exceeds the enumeration cap");
            total *= ord;
        }
    }

    template <typename F>
    void run(F&& body) const {
        const FiniteAbelianGroup& G = m.group();
        const int np = m.complex().count(m.p());
        std::vector<std::int64_t> idx(static_cast<std::size_t>(np), 0);
        Cochain phi = zero_cochain(m.complex(), G, m.p());
        std::vector<int> dst_lab(static_cast<std::size_t>(m.n_p1_sites()));
        for (std::int64_t n = 0; n < total; ++n) {
            for (int s = 0; s < np; ++s)
                phi.val[static_cast<std::size_t>(s)] = G.element(idx[static_cast<std::size_t>(s)]);
            const Cochain dphi = coboundary(m.complex(), G, phi);
            for (int j = 0; j < m.n_p1_sites(); ++j)
                dst_lab[static_cast<std::size_t>(j)] = static_cast<int>(
                    G.index_of(dphi.val[static_cast<std::size_t>(m.p1_site(j).simplex)]));
            body(phi, m.p1_index_of(dst_lab));
            for (int s = np - 1; s >= 0; --s) {
                auto& v = idx[static_cast<std::size_t>(s)];
                if (++v < G.order()) break;
                v = 0;
            }
        }
    }
};

}  // namespace

StateVector gauge_state(const HilbertModel& m, const StateVector& psi_p, std::int64_t enum_cap) {
    if (psi_p.size() != m.p_dim())
        throw domain_error("gauge_state: input state must live on the matter register");
    const GaugeSweep sweep(m, enum_cap);
    // Base gauge configuration |id...id>: regular bases put the identity at
    // label 0, so phi's image configuration is delta phi itself.
    StateVector acc = StateVector::Zero(m.dim());
    sweep.run([&](const Cochain& phi, std::int64_t dstp1) {
        const std::vector<Angle> ph = matter_phases_for_cochain(m, cochain_to_vec(m.group(), phi));
        for (std::int64_t pi = 0; pi < m.p_dim(); ++pi) {
            const std::complex<double> a = psi_p[pi];
            if (a == std::complex<double>(0.0, 0.0)) continue;
            acc[m.global_index(pi, dstp1)] += ph[static_cast<std::size_t>(pi)].unit() * a;
        }
    });
    return acc / static_cast<double>(sweep.total);
}

SparseOp gauge_operator_prime(const HilbertModel& m, const SparseOp& O_p, std::int64_t enum_cap) {
    if (O_p.rows() != m.p_dim() || O_p.cols() != m.p_dim())
        throw domain_error("gauge_operator_prime: operator must act on the matter register");
    const GaugeSweep sweep(m, enum_cap);
    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    sweep.run([&](const Cochain& phi, std::int64_t dstp1) {
        const std::vector<Angle> ph = matter_phases_for_cochain(m, cochain_to_vec(m.group(), phi));
        for (int c = 0; c < O_p.outerSize(); ++c)
            for (SparseOp::InnerIterator it(O_p, c); it; ++it) {
                const Angle rel = ph[static_cast<std::size_t>(it.row())] -
                                  ph[static_cast<std::size_t>(it.col())];
                trip.emplace_back(static_cast<int>(m.global_index(it.row(), dstp1)),
                                  static_cast<int>(m.global_index(it.col(), dstp1)),
                                  it.value() * rel.unit());
            }
    });
    SparseOp out(m.dim(), m.dim());
    out.setFromTriplets(trip.begin(), trip.end());
    const double z = static_cast<double>(cocycles(m.complex(), m.group(), m.p()).order());
    return SparseOp(out / z);
}

}  // namespace hfent
