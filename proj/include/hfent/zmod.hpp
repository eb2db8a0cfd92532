#pragma once

// Exact linear algebra over products of cyclic groups Z_{m_1} x ... x Z_{m_N}
// with per-coordinate moduli. Subgroups are held in Howell normal form, which
// is canonical: two constructions of the same subgroup produce identical
// generator matrices, and reductions against it are deterministic. Quotients
// are presented through an integer Smith normal form of the relation matrix.

#include <cstdint>
#include <optional>
#include <vector>

#include "hfent/error.hpp"

namespace hfent {

using ModVec = std::vector<std::int64_t>;

// Subgroup of the product group with the given column moduli. rows() is the
// Howell form: pivot columns strictly increase, each pivot divides its column
// modulus, entries above a pivot are reduced below it, and the span property
// holds (every member supported at column >= j is spanned by rows with pivot
// >= j, maintained by annihilator completion).
class SubgroupModM {
public:
    static SubgroupModM span(ModVec moduli, const std::vector<ModVec>& generators);
    static SubgroupModM zero(ModVec moduli);
    static SubgroupModM full(const ModVec& moduli);

    const ModVec& moduli() const { return moduli_; }
    const std::vector<ModVec>& rows() const { return rows_; }
    const std::vector<int>& pivot_cols() const { return pivot_cols_; }
    // Order of the pivot entry inside Z_{m_j}; the mixed-radix enumeration base.
    const std::vector<std::int64_t>& pivot_orders() const { return pivot_orders_; }
    std::vector<std::int64_t> row_orders() const;  // additive order of each row

    std::int64_t order() const;
    bool contains(const ModVec& x) const;
    // Coefficients over rows() reproducing x by greedy pivot reduction;
    // deterministic, nullopt when x is not a member.
    std::optional<ModVec> coefficients(const ModVec& x) const;

    // Deterministic enumeration: index -> element, mixed radix over pivot
    // orders with row 0 most significant. Valid for 0 <= index < order().
    ModVec element_at(std::int64_t index) const;

    bool operator==(const SubgroupModM& o) const { return moduli_ == o.moduli_ && rows_ == o.rows_; }

private:
    ModVec moduli_;
    std::vector<ModVec> rows_;
    std::vector<int> pivot_cols_;
    std::vector<std::int64_t> pivot_orders_;
};

SubgroupModM intersection(const SubgroupModM& a, const SubgroupModM& b);
SubgroupModM subgroup_sum(const SubgroupModM& a, const SubgroupModM& b);
// Image under the coordinate projection selecting `coords` (in that order).
SubgroupModM project(const SubgroupModM& s, const std::vector<int>& coords);

// Homomorphism between mixed-moduli product groups, column i = image of the
// i-th source unit vector.
struct ModMap {
    ModVec src_moduli, dst_moduli;
    std::vector<ModVec> col;

    ModVec apply(const ModVec& x) const;
};

SubgroupModM kernel(const ModMap& f);
SubgroupModM image(const ModMap& f);
// Canonical particular solution of f(x) = b (first solution in Howell
// reduction order); nullopt when none exists.
std::optional<ModVec> solve(const ModMap& f, const ModVec& b);
// Canonical solution of several simultaneous systems f_i(x) = b_i over the
// same source group (the maps are stacked into one).
std::optional<ModVec> solve_stacked(const std::vector<ModMap>& maps, const std::vector<ModVec>& rhs);

// Smith normal form of an integer matrix A (rows x cols) with full column
// rank over Q after stacking relations: returns the diagonal (ascending
// divisibility, positive) plus the right transform V and its inverse, so that
// the quotient Z^cols / rowspan(A) is isomorphic to + Z_{diag[t]} via c -> cV.
struct SmithDecomposition {
    std::vector<std::int64_t> diag;
    std::vector<std::vector<std::int64_t>> V, Vi;
};
SmithDecomposition smith_normal_form(std::vector<std::vector<std::int64_t>> A, int cols);

// Finite abelian quotient Z/B of subgroups of a mixed-moduli ambient group.
// Exposes invariant factors (> 1, ascending divisibility), deterministic
// representatives, and the reduction map ambient -> class coordinates.
class QuotientStructure {
public:
    QuotientStructure(SubgroupModM Z, SubgroupModM B);

    const SubgroupModM& numerator() const { return Z_; }
    const SubgroupModM& denominator() const { return B_; }
    const std::vector<std::int64_t>& factors() const { return factors_; }
    int rank() const { return static_cast<int>(factors_.size()); }
    std::int64_t order() const;
    const std::vector<ModVec>& representatives() const { return reps_; }
    // Class coordinates of x (mod factors); nullopt when x is not in Z.
    std::optional<ModVec> reduce(const ModVec& x) const;

private:
    SubgroupModM Z_, B_;
    std::vector<std::int64_t> factors_;
    std::vector<int> keep_;
    std::vector<std::vector<std::int64_t>> V_;
    std::vector<std::int64_t> diag_;
    std::vector<ModVec> reps_;
};

}  // namespace hfent
