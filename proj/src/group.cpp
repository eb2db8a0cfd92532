#include "hfent/group.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

namespace hfent {

namespace {

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace

Angle Angle::turns(std::int64_t num, std::int64_t den) {
    if (den == 0) throw structural_error("Angle with zero denominator");
    if (den < 0) {
        den = -den;
        num = -num;
    }
    num = mod_pos(num, den);
    std::int64_t g = std::gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    Angle a;
    a.num_ = num;
    a.den_ = den;
    return a;
}

Angle Angle::operator+(const Angle& o) const {
    std::int64_t l = std::lcm(den_, o.den_);
    return turns(num_ * (l / den_) + o.num_ * (l / o.den_), l);
}

Angle Angle::operator-() const { return turns(-num_, den_); }

double Angle::radians() const {
    return 2.0 * std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_);
}

std::complex<double> Angle::unit() const { return std::polar(1.0, radians()); }

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<std::int64_t> factors) {
    for (std::int64_t f : factors)
        if (f < 2) throw structural_error("group factor < 2");

    // Normalize to the invariant-factor chain: split into prime powers, then
    // for each prime give the largest power to the last factor, next largest
    // to the one before, and so on. Result: d1 | d2 | ... | dr, ascending.
    std::map<std::int64_t, std::vector<std::int64_t>> prime_powers;  // p -> powers, descending
    for (std::int64_t f : factors) {
        std::int64_t rest = f;
        for (std::int64_t p = 2; p * p <= rest; ++p) {
            if (rest % p) continue;
            std::int64_t q = 1;
            while (rest % p == 0) {
                rest /= p;
                q *= p;
            }
            prime_powers[p].push_back(q);
        }
        if (rest > 1) prime_powers[rest].push_back(rest);
    }
    std::size_t rank = 0;
    for (auto& [p, powers] : prime_powers) {
        std::sort(powers.begin(), powers.end(), std::greater<>());
        rank = std::max(rank, powers.size());
    }
    factors_.assign(rank, 1);
    for (auto& [p, powers] : prime_powers)
        for (std::size_t i = 0; i < powers.size(); ++i)
            factors_[rank - 1 - i] *= powers[i];  // largest power into the last slot

    order_ = 1;
    for (std::int64_t f : factors_) {
        if (order_ > (std::int64_t{1} << 56) / f)
            throw capability_error("group order exceeds 2^56");
        order_ *= f;
    }
}

std::string FiniteAbelianGroup::name() const {
    if (factors_.empty()) return "Z1";
    std::string s;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i) s += "x";
        s += "Z" + std::to_string(factors_[i]);
    }
    return s;
}

void FiniteAbelianGroup::check_rank(std::size_t got) const {
    if (got != factors_.size())
        throw structural_error("element rank " + std::to_string(got) + " does not match group " + name());
}

GroupElement FiniteAbelianGroup::identity() const {
    return GroupElement{std::vector<std::int64_t>(factors_.size(), 0)};
}

GroupElement FiniteAbelianGroup::add(const GroupElement& a, const GroupElement& b) const {
    check_rank(a.res.size());
    check_rank(b.res.size());
    GroupElement out = a;
    for (std::size_t i = 0; i < factors_.size(); ++i) out.res[i] = mod_pos(a.res[i] + b.res[i], factors_[i]);
    return out;
}

GroupElement FiniteAbelianGroup::neg(const GroupElement& a) const {
    check_rank(a.res.size());
    GroupElement out = a;
    for (std::size_t i = 0; i < factors_.size(); ++i) out.res[i] = mod_pos(-a.res[i], factors_[i]);
    return out;
}

GroupElement FiniteAbelianGroup::scale(const GroupElement& a, std::int64_t s) const {
    check_rank(a.res.size());
    GroupElement out = a;
    for (std::size_t i = 0; i < factors_.size(); ++i) out.res[i] = mod_pos(a.res[i] * s, factors_[i]);
    return out;
}

Character FiniteAbelianGroup::zero_char() const {
    return Character{std::vector<std::int64_t>(factors_.size(), 0)};
}

Character FiniteAbelianGroup::add(const Character& a, const Character& b) const {
    check_rank(a.res.size());
    check_rank(b.res.size());
    Character out = a;
    for (std::size_t i = 0; i < factors_.size(); ++i) out.res[i] = mod_pos(a.res[i] + b.res[i], factors_[i]);
    return out;
}

Character FiniteAbelianGroup::neg(const Character& a) const {
    check_rank(a.res.size());
    Character out = a;
    for (std::size_t i = 0; i < factors_.size(); ++i) out.res[i] = mod_pos(-a.res[i], factors_[i]);
    return out;
}

Character FiniteAbelianGroup::scale(const Character& a, std::int64_t s) const {
    check_rank(a.res.size());
    Character out = a;
    for (std::size_t i = 0; i < factors_.size(); ++i) out.res[i] = mod_pos(a.res[i] * s, factors_[i]);
    return out;
}

Angle FiniteAbelianGroup::eval(const Character& rho, const GroupElement& g) const {
    check_rank(rho.res.size());
    check_rank(g.res.size());
    Angle acc;
    for (std::size_t i = 0; i < factors_.size(); ++i)
        acc = acc + Angle::turns(rho.res[i] * g.res[i], factors_[i]);
    return acc;
}

std::int64_t FiniteAbelianGroup::index_of(const GroupElement& g) const {
    check_rank(g.res.size());
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) idx = idx * factors_[i] + mod_pos(g.res[i], factors_[i]);
    return idx;
}

std::int64_t FiniteAbelianGroup::index_of(const Character& c) const {
    check_rank(c.res.size());
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < factors_.size(); ++i) idx = idx * factors_[i] + mod_pos(c.res[i], factors_[i]);
    return idx;
}

GroupElement FiniteAbelianGroup::element(std::int64_t index) const {
    if (index < 0 || index >= order_) throw structural_error("element index out of range");
    GroupElement g = identity();
    for (std::size_t i = factors_.size(); i-- > 0;) {
        g.res[i] = index % factors_[i];
        index /= factors_[i];
    }
    return g;
}

Character FiniteAbelianGroup::character(std::int64_t index) const {
    GroupElement g = element(index);
    return Character{std::move(g.res)};
}

std::vector<GroupElement> FiniteAbelianGroup::enumerate_elements(std::int64_t cap) const {
    if (order_ > cap)
        throw capability_error("enumeration of " + name() + " needs cap >= " + std::to_string(order_));
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(order_));
    for (std::int64_t i = 0; i < order_; ++i) out.push_back(element(i));
    return out;
}

std::vector<Character> FiniteAbelianGroup::enumerate_characters(std::int64_t cap) const {
    if (order_ > cap)
        throw capability_error("enumeration of " + name() + " needs cap >= " + std::to_string(order_));
    std::vector<Character> out;
    out.reserve(static_cast<std::size_t>(order_));
    for (std::int64_t i = 0; i < order_; ++i) out.push_back(character(i));
    return out;
}

FiniteAbelianGroup parse_group_spec(const std::string& spec) {
    std::vector<std::int64_t> factors;
    std::size_t i = 0;
    while (i < spec.size()) {
        char c = spec[i];
        if (c == 'x' || c == 'X' || c == '*') {
            ++i;
            continue;
        }
        if (c != 'Z' && c != 'z') throw structural_error("bad group spec '" + spec + "'");
        ++i;
        std::size_t start = i;
        while (i < spec.size() && std::isdigit(static_cast<unsigned char>(spec[i]))) ++i;
        if (start == i) throw structural_error("bad group spec '" + spec + "'");
        factors.push_back(std::stoll(spec.substr(start, i - start)));
    }
    if (factors.empty()) throw structural_error("empty group spec '" + spec + "'");
    return FiniteAbelianGroup(std::move(factors));
}

}  // namespace hfent
