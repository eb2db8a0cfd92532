#include "hfent/homology.hpp"

#include <numeric>
#include <sstream>

namespace hfent {

namespace {

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::string factors_to_string(const std::vector<std::int64_t>& f) {
    if (f.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < f.size(); ++i) os << (i ? "x" : "") << 'Z' << f[i];
    return os.str();
}

}  // namespace

ModVec chain_moduli(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    const int r = G.rank();
    ModVec m;
    m.reserve(static_cast<std::size_t>(X.count(n)) * static_cast<std::size_t>(r));
    for (int s = 0; s < X.count(n); ++s)
        for (int i = 0; i < r; ++i) m.push_back(G.factors()[static_cast<std::size_t>(i)]);
    return m;
}

ModVec chain_to_vec(const FiniteAbelianGroup& G, const Chain& k) {
    ModVec v;
    for (const auto& c : k.coef) {
        if (static_cast<int>(c.res.size()) != G.rank()) throw domain_error("chain coefficient has wrong rank");
        v.insert(v.end(), c.res.begin(), c.res.end());
    }
    return v;
}

Chain vec_to_chain(const FiniteAbelianGroup& G, int dim, const ModVec& v) {
    const std::size_t r = static_cast<std::size_t>(G.rank());
    if (r == 0 || v.size() % r != 0) throw domain_error("vector length not a multiple of group rank");
    Chain k;
    k.dim = dim;
    for (std::size_t s = 0; s * r < v.size(); ++s) {
        Character c;
        c.res.assign(v.begin() + static_cast<std::ptrdiff_t>(s * r),
                     v.begin() + static_cast<std::ptrdiff_t>((s + 1) * r));
        k.coef.push_back(std::move(c));
    }
    return k;
}

ModVec cochain_to_vec(const FiniteAbelianGroup& G, const Cochain& phi) {
    ModVec v;
    for (const auto& g : phi.val) {
        if (static_cast<int>(g.res.size()) != G.rank()) throw domain_error("cochain value has wrong rank");
        v.insert(v.end(), g.res.begin(), g.res.end());
    }
    return v;
}

Cochain vec_to_cochain(const FiniteAbelianGroup& G, int dim, const ModVec& v) {
    const std::size_t r = static_cast<std::size_t>(G.rank());
    if (r == 0 || v.size() % r != 0) throw domain_error("vector length not a multiple of group rank");
    Cochain f;
    f.dim = dim;
    for (std::size_t s = 0; s * r < v.size(); ++s) {
        GroupElement g;
        g.res.assign(v.begin() + static_cast<std::ptrdiff_t>(s * r),
                     v.begin() + static_cast<std::ptrdiff_t>((s + 1) * r));
        f.val.push_back(std::move(g));
    }
    return f;
}

ModMap boundary_map(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    ModMap f;
    f.src_moduli = chain_moduli(X, G, n);
    f.dst_moduli = chain_moduli(X, G, n - 1);
    const std::size_t r = static_cast<std::size_t>(G.rank());
    f.col.assign(f.src_moduli.size(), ModVec(f.dst_moduli.size(), 0));
    if (n < 1 || f.dst_moduli.empty()) return f;
    for (int s = 0; s < X.count(n); ++s)
        for (const FaceEntry& e : X.faces(n, s))
            for (std::size_t i = 0; i < r; ++i) {
                std::int64_t m = f.dst_moduli[static_cast<std::size_t>(e.face) * r + i];
                std::int64_t& cell = f.col[static_cast<std::size_t>(s) * r + i]
                                          [static_cast<std::size_t>(e.face) * r + i];
                cell = mod_pos(cell + e.coeff, m);
            }
    return f;
}

ModMap coboundary_map(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    ModMap f;
    f.src_moduli = chain_moduli(X, G, n);
    f.dst_moduli = chain_moduli(X, G, n + 1);
    const std::size_t r = static_cast<std::size_t>(G.rank());
    f.col.assign(f.src_moduli.size(), ModVec(f.dst_moduli.size(), 0));
    if (f.src_moduli.empty() || f.dst_moduli.empty()) return f;
    for (int t = 0; t < X.count(n + 1); ++t)
        for (const FaceEntry& e : X.faces(n + 1, t))
            for (std::size_t i = 0; i < r; ++i) {
                std::int64_t m = f.dst_moduli[static_cast<std::size_t>(t) * r + i];
                std::int64_t& cell = f.col[static_cast<std::size_t>(e.face) * r + i]
                                          [static_cast<std::size_t>(t) * r + i];
                cell = mod_pos(cell + e.coeff, m);
            }
    return f;
}

SubgroupModM cycles(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    return kernel(boundary_map(X, G, n));
}

SubgroupModM boundaries(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    return image(boundary_map(X, G, n + 1));
}

SubgroupModM cocycles(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    return kernel(coboundary_map(X, G, n));
}

SubgroupModM coboundaries(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    if (n == 0) return SubgroupModM::zero(chain_moduli(X, G, 0));
    return image(coboundary_map(X, G, n - 1));
}

std::optional<Chain> boundary_preimage(const DeltaComplex& X, const FiniteAbelianGroup& G,
                                       const Chain& k) {
    if (k.dim < 0) throw domain_error("boundary preimage needs a chain of dimension >= 0");
    auto x = solve(boundary_map(X, G, k.dim + 1), chain_to_vec(G, k));
    if (!x) return std::nullopt;
    return vec_to_chain(G, k.dim + 1, *x);
}

std::optional<Cochain> coboundary_preimage(const DeltaComplex& X, const FiniteAbelianGroup& G,
                                           const Cochain& phip) {
    if (phip.dim < 1) throw domain_error("coboundary preimage needs a cochain of dimension >= 1");
    auto x = solve(coboundary_map(X, G, phip.dim - 1), cochain_to_vec(G, phip));
    if (!x) return std::nullopt;
    return vec_to_cochain(G, phip.dim - 1, *x);
}

SubgroupModM annihilator(const SubgroupModM& S) {
    std::int64_t L = 1;
    for (std::int64_t m : S.moduli()) L = std::lcm(L, m);
    ModMap f;
    f.src_moduli = S.moduli();
    f.dst_moduli.assign(S.rows().size(), L);
    f.col.assign(S.moduli().size(), ModVec(S.rows().size(), 0));
    for (std::size_t j = 0; j < S.rows().size(); ++j)
        for (std::size_t c = 0; c < S.moduli().size(); ++c)
            f.col[c][j] = mod_pos(S.rows()[j][c] * (L / S.moduli()[c]), L);
    return kernel(f);
}

HomologyStructure::HomologyStructure(const DeltaComplex& X, const FiniteAbelianGroup& G, int n, bool co)
    : G_(G),
      n_(n),
      co_(co),
      q_(co ? cocycles(X, G, n) : cycles(X, G, n), co ? coboundaries(X, G, n) : boundaries(X, G, n)) {}

std::vector<Chain> HomologyStructure::representative_chains() const {
    if (co_) throw domain_error("cohomology generators are cochains");
    std::vector<Chain> out;
    for (const auto& v : q_.representatives()) out.push_back(vec_to_chain(G_, n_, v));
    return out;
}

std::vector<Cochain> HomologyStructure::representative_cochains() const {
    if (!co_) throw domain_error("homology generators are chains");
    std::vector<Cochain> out;
    for (const auto& v : q_.representatives()) out.push_back(vec_to_cochain(G_, n_, v));
    return out;
}

std::optional<ModVec> HomologyStructure::reduce_chain(const Chain& k) const {
    if (co_) throw domain_error("cohomology classes reduce cochains");
    if (k.dim != n_) throw domain_error("chain dimension mismatch");
    return q_.reduce(chain_to_vec(G_, k));
}

std::optional<ModVec> HomologyStructure::reduce_cochain(const Cochain& phi) const {
    if (!co_) throw domain_error("homology classes reduce chains");
    if (phi.dim != n_) throw domain_error("cochain dimension mismatch");
    return q_.reduce(cochain_to_vec(G_, phi));
}

std::string HomologyStructure::factor_string() const { return factors_to_string(factors()); }

HomologyStructure homology(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    return HomologyStructure(X, G, n, false);
}

HomologyStructure cohomology(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    return HomologyStructure(X, G, n, true);
}

ModVec InducedMap::apply(const ModVec& x) const {
    if (x.size() != src_factors.size()) throw domain_error("induced map: coordinate size mismatch");
    ModVec out(dst_factors.size(), 0);
    for (std::size_t t = 0; t < x.size(); ++t)
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = mod_pos(out[j] + x[t] * col[t][j], dst_factors[j]);
    return out;
}

ModMap InducedMap::as_map() const { return ModMap{src_factors, dst_factors, col}; }

InducedMap induced_map(const HomologyStructure& h_src, const HomologyStructure& h_dst,
                       const std::function<Chain(const Chain&)>& push) {
    if (h_src.is_cohomology() || h_dst.is_cohomology())
        throw domain_error("induced maps are implemented on homology");
    InducedMap f;
    f.src_factors = h_src.factors();
    f.dst_factors = h_dst.factors();
    for (const Chain& rep : h_src.representative_chains()) {
        auto cls = h_dst.reduce_chain(push(rep));
        if (!cls) throw structural_error("induced map: pushed generator is not a cycle");
        f.col.push_back(*cls);
    }
    return f;
}

InducedMap induced_inclusion(const Subcomplex& sub, const HomologyStructure& h_sub,
                             const HomologyStructure& h_parent) {
    const FiniteAbelianGroup& G = h_sub.group();
    return induced_map(h_sub, h_parent, [&](const Chain& k) { return sub.push_chain(G, k); });
}

std::string MvResult::summary() const {
    std::ostringstream os;
    os << "H(AB)=" << factors_to_string(h_ab_factors) << " H(A)=" << factors_to_string(h_a_factors)
       << " H(B)=" << factors_to_string(h_b_factors) << " |S|=" << s_order
       << " |S^(HA+0)|=" << left_overlap_order << " |S^(0+HB)|=" << right_overlap_order
       << " holds=" << (holds ? "yes" : "no");
    return os.str();
}

MvResult mv_criterion(const Bipartition& cut, const FiniteAbelianGroup& G) {
    const int p = cut.p;
    HomologyStructure hAB = homology(cut.AB.complex(), G, p);
    HomologyStructure hA = homology(cut.A.complex(), G, p);
    HomologyStructure hB = homology(cut.B.complex(), G, p);

    auto through = [&](const Subcomplex& dst) {
        return [&, &dstc = dst](const Chain& k) {
            return dstc.restrict_chain(G, cut.AB.push_chain(G, k));
        };
    };
    InducedMap iA = induced_map(hAB, hA, through(cut.A));
    InducedMap iB = induced_map(hAB, hB, through(cut.B));

    const std::size_t na = hA.factors().size(), nb = hB.factors().size();
    ModVec moduli;
    moduli.insert(moduli.end(), hA.factors().begin(), hA.factors().end());
    moduli.insert(moduli.end(), hB.factors().begin(), hB.factors().end());

    std::vector<ModVec> gens;
    for (int t = 0; t < hAB.rank(); ++t) {
        ModVec v(na + nb, 0);
        for (std::size_t j = 0; j < na; ++j) v[j] = iA.col[static_cast<std::size_t>(t)][j];
        for (std::size_t j = 0; j < nb; ++j)
            v[na + j] = mod_pos(-iB.col[static_cast<std::size_t>(t)][j], hB.factors()[j]);
        gens.push_back(std::move(v));
    }
    SubgroupModM S = SubgroupModM::span(moduli, gens);

    auto block = [&](std::size_t from, std::size_t len) {
        std::vector<ModVec> unit;
        for (std::size_t j = 0; j < len; ++j) {
            ModVec e(na + nb, 0);
            e[from + j] = 1;
            unit.push_back(std::move(e));
        }
        return SubgroupModM::span(moduli, unit);
    };

    std::vector<int> coordsA(na), coordsB(nb);
    for (std::size_t j = 0; j < na; ++j) coordsA[j] = static_cast<int>(j);
    for (std::size_t j = 0; j < nb; ++j) coordsB[j] = static_cast<int>(na + j);
    std::vector<ModVec> negB;
    for (const auto& c : iB.col) {
        ModVec v(nb, 0);
        for (std::size_t j = 0; j < nb; ++j) v[j] = mod_pos(-c[j], hB.factors()[j]);
        negB.push_back(std::move(v));
    }

    MvResult out;
    out.h_ab_factors = hAB.factors();
    out.h_a_factors = hA.factors();
    out.h_b_factors = hB.factors();
    out.s_order = S.order();
    out.left_overlap_order = intersection(S, block(0, na)).order();
    out.right_overlap_order = intersection(S, block(na, nb)).order();
    out.projections_match = project(S, coordsA) == SubgroupModM::span(hA.factors(), iA.col) &&
                            project(S, coordsB) == SubgroupModM::span(hB.factors(), negB);
    out.holds = out.left_overlap_order == 1 && out.right_overlap_order == 1 && out.projections_match;
    return out;
}

}  // namespace hfent
