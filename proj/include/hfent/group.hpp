#pragma once

// Finite abelian groups in invariant-factor form, their Pontryagin duals, and
// exact angle arithmetic. Phases are rational multiples of 2*pi so the chain
// algebra downstream can be checked with zero tolerance.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "hfent/error.hpp"

namespace hfent {

// Fraction of a full turn, canonicalized to [0,1) and reduced. Angle addition
// is exact; conversion to a unit complex number happens only at the edge.
class Angle {
public:
    Angle() = default;

    // num/den turns; den != 0. Normalized mod 1.
    static Angle turns(std::int64_t num, std::int64_t den);

    Angle operator+(const Angle& o) const;
    Angle operator-() const;
    Angle operator-(const Angle& o) const { return *this + (-o); }
    Angle operator*(std::int64_t s) const { return turns(num_ * s, den_); }
    bool operator==(const Angle& o) const = default;

    bool is_zero() const { return num_ == 0; }
    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    double radians() const;
    std::complex<double> unit() const;  // exp(2*pi*i * num/den)

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

// Element of Z_{n1} x ... x Z_{nr}, one residue per invariant factor.
struct GroupElement {
    std::vector<std::int64_t> res;
    bool operator==(const GroupElement&) const = default;
};

// Character of the same group, identified with a residue tuple through the
// canonical isomorphism G ~= dual(G); evaluation lives on FiniteAbelianGroup.
struct Character {
    std::vector<std::int64_t> res;
    bool operator==(const Character&) const = default;
};

class FiniteAbelianGroup {
public:
    // Factors are normalized to the invariant-factor chain d1 | d2 | ... | dr
    // (every factor >= 2), so isomorphic presentations coincide: Z2xZ3 -> Z6.
    explicit FiniteAbelianGroup(std::vector<std::int64_t> factors);

    const std::vector<std::int64_t>& factors() const { return factors_; }
    int rank() const { return static_cast<int>(factors_.size()); }
    std::int64_t order() const { return order_; }
    std::int64_t exponent() const { return factors_.empty() ? 1 : factors_.back(); }
    std::string name() const;  // "Z2xZ4"
    bool operator==(const FiniteAbelianGroup& o) const { return factors_ == o.factors_; }

    GroupElement identity() const;
    GroupElement add(const GroupElement& a, const GroupElement& b) const;
    GroupElement neg(const GroupElement& a) const;
    GroupElement sub(const GroupElement& a, const GroupElement& b) const { return add(a, neg(b)); }
    GroupElement scale(const GroupElement& a, std::int64_t s) const;

    Character zero_char() const;
    Character add(const Character& a, const Character& b) const;
    Character neg(const Character& a) const;
    Character scale(const Character& a, std::int64_t s) const;

    // rho(g) = sum_i 2*pi * rho_i g_i / n_i, exact.
    Angle eval(const Character& rho, const GroupElement& g) const;

    // Lexicographic enumeration; index 0 is the identity / trivial character.
    std::int64_t index_of(const GroupElement& g) const;
    std::int64_t index_of(const Character& c) const;
    GroupElement element(std::int64_t index) const;
    Character character(std::int64_t index) const;

    // All elements in lexicographic order; guarded by cap (default 2^16).
    std::vector<GroupElement> enumerate_elements(std::int64_t cap = 1 << 16) const;
    std::vector<Character> enumerate_characters(std::int64_t cap = 1 << 16) const;

private:
    void check_rank(std::size_t got) const;

    std::vector<std::int64_t> factors_;
    std::int64_t order_ = 1;
};

// Parses "Z2", "Z4", "Z2xZ3" (case-insensitive separators); factors >= 2.
FiniteAbelianGroup parse_group_spec(const std::string& spec);

}  // namespace hfent
