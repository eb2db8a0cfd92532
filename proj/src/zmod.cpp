#include "hfent/zmod.hpp"

#include <algorithm>
#include <numeric>

namespace hfent {

namespace {

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

void reduce_vec(ModVec& v, const ModVec& moduli) {
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = mod_pos(v[j], moduli[j]);
}

bool is_zero_vec(const ModVec& v) {
    return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
}

// g = gcd(a,b) with x*a + y*b = g; |x|,|y| stay below max(|a|,|b|).
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
    if (b == 0) {
        x = (a < 0) ? -1 : 1;
        y = 0;
        return a < 0 ? -a : a;
    }
    std::int64_t x1, y1;
    std::int64_t g = ext_gcd(b, a % b, x1, y1);
    x = y1;
    y = x1 - (a / b) * y1;
    return g;
}

// Unit u (coprime to L) with u*a = gcd(a,m) mod m. Exists because the unit
// group of Z_L surjects onto the unit group of Z_{m/gcd}.
std::int64_t unit_scale(std::int64_t a, std::int64_t m, std::int64_t L) {
    std::int64_t d = std::gcd(a, m);
    std::int64_t a1 = a / d, m1 = m / d;
    std::int64_t u = 1;
    if (m1 > 1) {
        std::int64_t x, y;
        ext_gcd(a1 % m1, m1, x, y);
        u = mod_pos(x, m1);
    }
    for (std::int64_t k = 0; k <= L / std::max<std::int64_t>(m1, 1) + 1; ++k) {
        std::int64_t cand = u + k * m1;
        if (std::gcd(mod_pos(cand, L) == 0 ? L : mod_pos(cand, L), L) == 1) return mod_pos(cand, L) == 0 ? L : mod_pos(cand, L);
    }
    throw structural_error("no unit lift found (internal)");
}

std::int64_t lcm_of(const ModVec& moduli) {
    std::int64_t L = 1;
    for (std::int64_t m : moduli) L = std::lcm(L, m);
    return L;
}

}  // namespace

SubgroupModM SubgroupModM::span(ModVec moduli, const std::vector<ModVec>& generators) {
    for (std::int64_t m : moduli)
        if (m < 1) throw structural_error("modulus < 1");
    const std::size_t N = moduli.size();
    const std::int64_t L = lcm_of(moduli);

    std::vector<ModVec> work;
    for (ModVec g : generators) {
        if (g.size() != N) throw structural_error("generator size mismatch");
        reduce_vec(g, moduli);
        if (!is_zero_vec(g)) work.push_back(std::move(g));
    }

    std::vector<ModVec> out;
    std::vector<int> pivots;
    for (std::size_t j = 0; j < N; ++j) {
        // Rows in `work` are zero on all columns < j.
        std::vector<ModVec> with, without;
        for (auto& r : work) (r[j] != 0 ? with : without).push_back(std::move(r));
        work = std::move(without);
        if (with.empty()) continue;

        ModVec p = std::move(with[0]);
        for (std::size_t t = 1; t < with.size(); ++t) {
            ModVec& r = with[t];
            std::int64_t x, y;
            std::int64_t g = ext_gcd(p[j], r[j], x, y);
            ModVec np(N, 0), nr(N, 0);
            for (std::size_t c = j; c < N; ++c) {
                np[c] = mod_pos(x * p[c] + y * r[c], moduli[c]);
                nr[c] = mod_pos((r[j] / g) * p[c] - (p[j] / g) * r[c], moduli[c]);
            }
            p = std::move(np);
            if (!is_zero_vec(nr)) work.push_back(std::move(nr));
            if (p[j] == 0) throw structural_error("howell pivot vanished (internal)");
        }

        // Normalize the pivot to the canonical ideal generator gcd(p_j, m_j).
        std::int64_t d = std::gcd(p[j], moduli[j]);
        std::int64_t u = unit_scale(p[j], moduli[j], L);
        for (std::size_t c = j; c < N; ++c) p[c] = mod_pos(u * p[c], moduli[c]);
        p[j] = d;  // u*p_j = d mod m_j by construction

        // Annihilator completion keeps the span property for later columns.
        std::int64_t ord = moduli[j] / d;
        ModVec ann(N, 0);
        for (std::size_t c = j + 1; c < N; ++c) ann[c] = mod_pos(ord * p[c], moduli[c]);
        if (!is_zero_vec(ann)) work.push_back(std::move(ann));

        pivots.push_back(static_cast<int>(j));
        out.push_back(std::move(p));
    }

    // Reduce entries above each pivot into [0, pivot).
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t j = static_cast<std::size_t>(pivots[i]);
        std::int64_t d = out[i][j];
        for (std::size_t i2 = 0; i2 < i; ++i2) {
            std::int64_t q = out[i2][j] / d;
            if (q == 0) continue;
            for (std::size_t c = j; c < N; ++c) out[i2][c] = mod_pos(out[i2][c] - q * out[i][c], moduli[c]);
        }
    }

    SubgroupModM S;
    S.moduli_ = std::move(moduli);
    S.rows_ = std::move(out);
    S.pivot_cols_ = std::move(pivots);
    for (std::size_t i = 0; i < S.rows_.size(); ++i)
        S.pivot_orders_.push_back(S.moduli_[static_cast<std::size_t>(S.pivot_cols_[i])] /
                                  S.rows_[i][static_cast<std::size_t>(S.pivot_cols_[i])]);
    return S;
}

SubgroupModM SubgroupModM::zero(ModVec moduli) { return span(std::move(moduli), {}); }

SubgroupModM SubgroupModM::full(const ModVec& moduli) {
    std::vector<ModVec> gens;
    for (std::size_t i = 0; i < moduli.size(); ++i) {
        ModVec e(moduli.size(), 0);
        e[i] = 1;
        gens.push_back(std::move(e));
    }
    return span(moduli, gens);
}

std::vector<std::int64_t> SubgroupModM::row_orders() const {
    std::vector<std::int64_t> out;
    for (const auto& r : rows_) {
        std::int64_t o = 1;
        for (std::size_t c = 0; c < r.size(); ++c)
            if (r[c] != 0) o = std::lcm(o, moduli_[c] / std::gcd(r[c], moduli_[c]));
        out.push_back(o);
    }
    return out;
}

std::int64_t SubgroupModM::order() const {
    std::int64_t o = 1;
    for (std::int64_t q : pivot_orders_) {
        if (o > (std::int64_t{1} << 62) / q) throw capability_error("subgroup order exceeds 2^62");
        o *= q;
    }
    return o;
}

bool SubgroupModM::contains(const ModVec& x) const { return coefficients(x).has_value(); }

std::optional<ModVec> SubgroupModM::coefficients(const ModVec& x) const {
    if (x.size() != moduli_.size()) throw structural_error("membership: size mismatch");
    ModVec v = x;
    reduce_vec(v, moduli_);
    ModVec coeff(rows_.size(), 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        std::size_t j = static_cast<std::size_t>(pivot_cols_[i]);
        for (std::size_t c = (i == 0 ? 0 : static_cast<std::size_t>(pivot_cols_[i - 1]) + 1); c < j; ++c)
            if (v[c] != 0) return std::nullopt;  // support before next pivot cannot be cleared
        std::int64_t d = rows_[i][j];
        if (v[j] % d != 0) return std::nullopt;
        std::int64_t q = v[j] / d;
        coeff[i] = q;
        if (q != 0)
            for (std::size_t c = j; c < v.size(); ++c) v[c] = mod_pos(v[c] - q * rows_[i][c], moduli_[c]);
    }
    if (!is_zero_vec(v)) return std::nullopt;
    return coeff;
}

ModVec SubgroupModM::element_at(std::int64_t index) const {
    if (index < 0 || index >= order()) throw structural_error("subgroup element index out of range");
    ModVec digits(rows_.size(), 0);
    for (std::size_t i = rows_.size(); i-- > 0;) {
        digits[i] = index % pivot_orders_[i];
        index /= pivot_orders_[i];
    }
    ModVec v(moduli_.size(), 0);
    for (std::size_t i = 0; i < rows_.size(); ++i)
        if (digits[i] != 0)
            for (std::size_t c = 0; c < v.size(); ++c) v[c] = mod_pos(v[c] + digits[i] * rows_[i][c], moduli_[c]);
    return v;
}

SubgroupModM intersection(const SubgroupModM& a, const SubgroupModM& b) {
    if (a.moduli() != b.moduli()) throw structural_error("intersection: ambient mismatch");
    const std::size_t N = a.moduli().size();
    ModVec big_moduli(2 * N);
    for (std::size_t i = 0; i < N; ++i) big_moduli[i] = big_moduli[N + i] = a.moduli()[i];
    // Span of {(r, r)} and {(r', 0)}: pairs (y, x) with x in A and x-y in B';
    // rows with zero first block carry exactly A cap B in the second block.
    std::vector<ModVec> gens;
    for (const auto& r : a.rows()) {
        ModVec v(2 * N, 0);
        for (std::size_t i = 0; i < N; ++i) v[i] = v[N + i] = r[i];
        gens.push_back(std::move(v));
    }
    for (const auto& r : b.rows()) {
        ModVec v(2 * N, 0);
        for (std::size_t i = 0; i < N; ++i) v[i] = r[i];
        gens.push_back(std::move(v));
    }
    SubgroupModM big = SubgroupModM::span(std::move(big_moduli), gens);
    std::vector<ModVec> out;
    for (std::size_t i = 0; i < big.rows().size(); ++i)
        if (big.pivot_cols()[i] >= static_cast<int>(N))
            out.emplace_back(big.rows()[i].begin() + static_cast<std::ptrdiff_t>(N), big.rows()[i].end());
    return SubgroupModM::span(a.moduli(), out);
}

SubgroupModM subgroup_sum(const SubgroupModM& a, const SubgroupModM& b) {
    if (a.moduli() != b.moduli()) throw structural_error("sum: ambient mismatch");
    std::vector<ModVec> gens = a.rows();
    gens.insert(gens.end(), b.rows().begin(), b.rows().end());
    return SubgroupModM::span(a.moduli(), gens);
}

SubgroupModM project(const SubgroupModM& s, const std::vector<int>& coords) {
    ModVec moduli;
    for (int c : coords) moduli.push_back(s.moduli().at(static_cast<std::size_t>(c)));
    std::vector<ModVec> gens;
    for (const auto& r : s.rows()) {
        ModVec v;
        for (int c : coords) v.push_back(r[static_cast<std::size_t>(c)]);
        gens.push_back(std::move(v));
    }
    return SubgroupModM::span(std::move(moduli), gens);
}

ModVec ModMap::apply(const ModVec& x) const {
    if (x.size() != src_moduli.size()) throw structural_error("map apply: size mismatch");
    ModVec out(dst_moduli.size(), 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] = mod_pos(out[j] + x[i] * col[i][j], dst_moduli[j]);
    }
    return out;
}

namespace {

// Graph subgroup {(f(x), x)} with destination columns leading; the shared
// skeleton of kernel/solve.
SubgroupModM graph_subgroup(const ModMap& f) {
    const std::size_t ns = f.src_moduli.size(), nd = f.dst_moduli.size();
    if (f.col.size() != ns) throw structural_error("map has wrong column count");
    ModVec moduli(nd + ns);
    for (std::size_t j = 0; j < nd; ++j) moduli[j] = f.dst_moduli[j];
    for (std::size_t i = 0; i < ns; ++i) moduli[nd + i] = f.src_moduli[i];
    std::vector<ModVec> gens;
    for (std::size_t i = 0; i < ns; ++i) {
        if (f.col[i].size() != nd) throw structural_error("map column size mismatch");
        ModVec v(nd + ns, 0);
        for (std::size_t j = 0; j < nd; ++j) v[j] = f.col[i][j];
        v[nd + i] = 1;
        gens.push_back(std::move(v));
    }
    return SubgroupModM::span(std::move(moduli), gens);
}

}  // namespace

SubgroupModM kernel(const ModMap& f) {
    const std::size_t ns = f.src_moduli.size(), nd = f.dst_moduli.size();
    SubgroupModM big = graph_subgroup(f);
    std::vector<ModVec> gens;
    for (std::size_t i = 0; i < big.rows().size(); ++i)
        if (big.pivot_cols()[i] >= static_cast<int>(nd))
            gens.emplace_back(big.rows()[i].begin() + static_cast<std::ptrdiff_t>(nd), big.rows()[i].end());
    (void)ns;
    return SubgroupModM::span(f.src_moduli, gens);
}

SubgroupModM image(const ModMap& f) { return SubgroupModM::span(f.dst_moduli, f.col); }

std::optional<ModVec> solve(const ModMap& f, const ModVec& b) {
    const std::size_t ns = f.src_moduli.size(), nd = f.dst_moduli.size();
    if (b.size() != nd) throw structural_error("solve: rhs size mismatch");
    SubgroupModM big = graph_subgroup(f);
    ModVec v(nd + ns, 0);
    for (std::size_t j = 0; j < nd; ++j) v[j] = mod_pos(b[j], f.dst_moduli[j]);
    const auto& moduli = big.moduli();
    // Coset canonicalization: flooring reduction, not exact division, so a
    // nonzero remainder surfaces as a nonzero destination block at the end.
    for (std::size_t i = 0; i < big.rows().size(); ++i) {
        std::size_t j = static_cast<std::size_t>(big.pivot_cols()[i]);
        if (j >= nd) break;  // source-block rows do not touch the destination
        if (v[j] == 0) continue;
        std::int64_t q = v[j] / big.rows()[i][j];
        for (std::size_t c = j; c < v.size(); ++c) v[c] = mod_pos(v[c] - q * big.rows()[i][c], moduli[c]);
    }
    for (std::size_t j = 0; j < nd; ++j)
        if (v[j] != 0) return std::nullopt;
    ModVec x(ns, 0);
    for (std::size_t i = 0; i < ns; ++i) x[i] = mod_pos(-v[nd + i], f.src_moduli[i]);
    return x;
}

std::optional<ModVec> solve_stacked(const std::vector<ModMap>& maps, const std::vector<ModVec>& rhs) {
    if (maps.empty() || maps.size() != rhs.size()) throw structural_error("solve_stacked: bad arguments");
    ModMap stacked;
    stacked.src_moduli = maps[0].src_moduli;
    const std::size_t ns = stacked.src_moduli.size();
    stacked.col.assign(ns, {});
    ModVec b;
    for (std::size_t t = 0; t < maps.size(); ++t) {
        if (maps[t].src_moduli != stacked.src_moduli) throw structural_error("solve_stacked: source mismatch");
        stacked.dst_moduli.insert(stacked.dst_moduli.end(), maps[t].dst_moduli.begin(), maps[t].dst_moduli.end());
        for (std::size_t i = 0; i < ns; ++i)
            stacked.col[i].insert(stacked.col[i].end(), maps[t].col[i].begin(), maps[t].col[i].end());
        b.insert(b.end(), rhs[t].begin(), rhs[t].end());
    }
    return solve(stacked, b);
}

SmithDecomposition smith_normal_form(std::vector<std::vector<std::int64_t>> A, int cols) {
    const std::size_t R = A.size();
    const std::size_t C = static_cast<std::size_t>(cols);
    for (auto& r : A)
        if (r.size() != C) throw structural_error("smith: ragged matrix");

    auto ident = [&](std::size_t n) {
        std::vector<std::vector<std::int64_t>> M(n, std::vector<std::int64_t>(n, 0));
        for (std::size_t i = 0; i < n; ++i) M[i][i] = 1;
        return M;
    };
    SmithDecomposition out;
    out.V = ident(C);
    out.Vi = ident(C);

    auto check = [](std::int64_t v) {
        if (v > (std::int64_t{1} << 56) || v < -(std::int64_t{1} << 56))
            throw structural_error("smith: entry overflow");
        return v;
    };
    auto col_axpy = [&](std::size_t dst, std::size_t src, std::int64_t q) {
        // A: col_dst += q*col_src; V tracks the same op, Vi the inverse op.
        for (std::size_t i = 0; i < R; ++i) A[i][dst] = check(A[i][dst] + q * A[i][src]);
        for (std::size_t i = 0; i < C; ++i) out.V[i][dst] = check(out.V[i][dst] + q * out.V[i][src]);
        for (std::size_t j = 0; j < C; ++j) out.Vi[src][j] = check(out.Vi[src][j] - q * out.Vi[dst][j]);
    };
    auto col_swap = [&](std::size_t a, std::size_t b) {
        for (std::size_t i = 0; i < R; ++i) std::swap(A[i][a], A[i][b]);
        for (std::size_t i = 0; i < C; ++i) std::swap(out.V[i][a], out.V[i][b]);
        std::swap(out.Vi[a], out.Vi[b]);
    };
    auto row_axpy = [&](std::size_t dst, std::size_t src, std::int64_t q) {
        for (std::size_t j = 0; j < C; ++j) A[dst][j] = check(A[dst][j] + q * A[src][j]);
    };
    auto row_swap = [&](std::size_t a, std::size_t b) { std::swap(A[a], A[b]); };
    auto row_negate = [&](std::size_t r) {
        for (std::size_t j = 0; j < C; ++j) A[r][j] = -A[r][j];
    };

    std::size_t t = 0;
    while (t < C && t < R) {
        // Find the smallest-magnitude nonzero entry in the trailing block.
        std::size_t pi = t, pj = t;
        std::int64_t best = 0;
        for (std::size_t i = t; i < R; ++i)
            for (std::size_t j = t; j < C; ++j)
                if (A[i][j] != 0 && (best == 0 || std::abs(A[i][j]) < best)) {
                    best = std::abs(A[i][j]);
                    pi = i;
                    pj = j;
                }
        if (best == 0) break;
        if (pi != t) row_swap(pi, t);
        if (pj != t) col_swap(pj, t);

        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = t + 1; i < R; ++i)
                if (A[i][t] != 0) {
                    std::int64_t q = A[i][t] / A[t][t];
                    row_axpy(i, t, -q);
                    if (A[i][t] != 0) {
                        row_swap(i, t);
                        clean = false;
                    }
                }
            for (std::size_t j = t + 1; j < C; ++j)
                if (A[t][j] != 0) {
                    std::int64_t q = A[t][j] / A[t][t];
                    col_axpy(j, t, -q);
                    if (A[t][j] != 0) {
                        col_swap(j, t);
                        clean = false;
                    }
                }
        }
        if (A[t][t] < 0) row_negate(t);
        // Pivot must divide the rest of the block for the divisibility chain.
        bool divides = true;
        for (std::size_t i = t + 1; i < R && divides; ++i)
            for (std::size_t j = t + 1; j < C && divides; ++j)
                if (A[i][j] % A[t][t] != 0) {
                    row_axpy(t, i, 1);
                    divides = false;
                }
        if (divides) ++t;
    }

    out.diag.assign(C, 0);
    for (std::size_t j = 0; j < C && j < R; ++j) out.diag[j] = A[j][j];
    return out;
}

QuotientStructure::QuotientStructure(SubgroupModM Z, SubgroupModM B) : Z_(std::move(Z)), B_(std::move(B)) {
    if (Z_.moduli() != B_.moduli()) throw structural_error("quotient: ambient mismatch");
    for (const auto& b : B_.rows())
        if (!Z_.contains(b)) throw structural_error("quotient: denominator not inside numerator");

    const std::size_t s = Z_.rows().size();
    const std::size_t N = Z_.moduli().size();
    if (s == 0) return;  // trivial quotient

    std::vector<std::int64_t> row_ord = Z_.row_orders();

    // Relations: coefficient vectors c (mod row orders) with sum c_i z_i in B.
    ModVec big_moduli(N + s);
    for (std::size_t j = 0; j < N; ++j) big_moduli[j] = Z_.moduli()[j];
    for (std::size_t i = 0; i < s; ++i) big_moduli[N + i] = row_ord[i];
    std::vector<ModVec> gens;
    for (std::size_t i = 0; i < s; ++i) {
        ModVec v(N + s, 0);
        for (std::size_t j = 0; j < N; ++j) v[j] = Z_.rows()[i][j];
        v[N + i] = 1;
        gens.push_back(std::move(v));
    }
    for (const auto& b : B_.rows()) {
        ModVec v(N + s, 0);
        for (std::size_t j = 0; j < N; ++j) v[j] = b[j];
        gens.push_back(std::move(v));
    }
    SubgroupModM big = SubgroupModM::span(std::move(big_moduli), gens);

    std::vector<std::vector<std::int64_t>> rel;
    for (std::size_t i = 0; i < big.rows().size(); ++i)
        if (big.pivot_cols()[i] >= static_cast<int>(N))
            rel.emplace_back(big.rows()[i].begin() + static_cast<std::ptrdiff_t>(N), big.rows()[i].end());
    for (std::size_t i = 0; i < s; ++i) {
        std::vector<std::int64_t> v(s, 0);
        v[i] = row_ord[i];
        rel.push_back(std::move(v));
    }

    SmithDecomposition snf = smith_normal_form(rel, static_cast<int>(s));
    diag_ = snf.diag;
    V_ = snf.V;
    for (std::size_t tcol = 0; tcol < s; ++tcol) {
        if (diag_[tcol] == 0) throw structural_error("quotient: infinite factor (internal)");
        if (diag_[tcol] > 1) {
            keep_.push_back(static_cast<int>(tcol));
            factors_.push_back(diag_[tcol]);
        }
    }
    // Representative of generator t: row t of V^{-1} combined over the Howell
    // basis of Z.
    for (int tcol : keep_) {
        ModVec rep(N, 0);
        for (std::size_t i = 0; i < s; ++i) {
            std::int64_t c = snf.Vi[static_cast<std::size_t>(tcol)][i];
            if (c == 0) continue;
            for (std::size_t j = 0; j < N; ++j)
                rep[j] = mod_pos(rep[j] + c * Z_.rows()[i][j], Z_.moduli()[j]);
        }
        reps_.push_back(std::move(rep));
    }
    // Sanity: representatives reduce to unit class vectors, denominators to 0.
    for (std::size_t tcol = 0; tcol < reps_.size(); ++tcol) {
        auto r = reduce(reps_[tcol]);
        if (!r) throw structural_error("quotient: representative not in numerator (internal)");
        for (std::size_t q = 0; q < r->size(); ++q)
            if ((*r)[q] != (q == tcol ? 1 : 0))
                throw structural_error("quotient: representative reduction mismatch (internal)");
    }
    for (const auto& b : B_.rows()) {
        auto r = reduce(b);
        if (!r || !is_zero_vec(*r)) throw structural_error("quotient: boundary does not reduce to zero (internal)");
    }
}

std::int64_t QuotientStructure::order() const {
    std::int64_t o = 1;
    for (std::int64_t f : factors_) {
        if (o > (std::int64_t{1} << 62) / f) throw capability_error("quotient order exceeds 2^62");
        o *= f;
    }
    return o;
}

std::optional<ModVec> QuotientStructure::reduce(const ModVec& x) const {
    auto coeff = Z_.coefficients(x);
    if (!coeff) return std::nullopt;
    ModVec out(factors_.size(), 0);
    if (factors_.empty()) return out;
    const std::size_t s = Z_.rows().size();
    for (std::size_t q = 0; q < keep_.size(); ++q) {
        std::size_t tcol = static_cast<std::size_t>(keep_[q]);
        std::int64_t acc = 0;
        for (std::size_t i = 0; i < s; ++i) acc += (*coeff)[i] % diag_[tcol] * (V_[i][tcol] % diag_[tcol]);
        out[q] = mod_pos(acc, factors_[q]);
    }
    return out;
}

}  // namespace hfent
