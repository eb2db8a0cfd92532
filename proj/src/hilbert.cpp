#include "hfent/hilbert.hpp"

#include <cstdlib>
#include <string>
#include <utility>

namespace hfent {

std::int64_t default_dim_cap() {
    if (const char* env = std::getenv("HFENT_DIM_CAP")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::int64_t>(v);
    }
    return std::int64_t{1} << 22;
}

HilbertModel HilbertModel::regular(std::shared_ptr<const DeltaComplex> X, FiniteAbelianGroup G,
                                   int p, std::int64_t dim_cap) {
    if (!X) throw structural_error("null complex");
    if (p < 0 || p + 1 > X->dimension())
        throw domain_error("model degree p = " + std::to_string(p) + " needs (p+1)-simplices in " +
                           X->name());
    std::vector<std::vector<Character>> pb(static_cast<std::size_t>(X->count(p)),
                                           G.enumerate_characters());
    std::vector<std::vector<GroupElement>> p1b(static_cast<std::size_t>(X->count(p + 1)),
                                               G.enumerate_elements());
    return custom(std::move(X), std::move(G), p, std::move(pb), std::move(p1b), dim_cap);
}

HilbertModel HilbertModel::custom(std::shared_ptr<const DeltaComplex> X, FiniteAbelianGroup G,
                                  int p, std::vector<std::vector<Character>> p_bases,
                                  std::vector<std::vector<GroupElement>> p1_bases,
                                  std::int64_t dim_cap) {
    if (!X) throw structural_error("null complex");
    if (p < 0 || p + 1 > X->dimension())
        throw domain_error("model degree p = " + std::to_string(p) + " needs (p+1)-simplices in " +
                           X->name());
    if (p_bases.size() != static_cast<std::size_t>(X->count(p)) ||
        p1_bases.size() != static_cast<std::size_t>(X->count(p + 1)))
        throw structural_error("site basis list length does not match simplex counts");

    HilbertModel m;
    m.X_ = std::move(X);
    m.G_ = std::move(G);
    m.p_ = p;
    const auto all = m.G_.enumerate_elements();
    for (int s = 0; s < static_cast<int>(p_bases.size()); ++s) {
        auto& basis = p_bases[static_cast<std::size_t>(s)];
        if (basis.empty()) throw structural_error("empty basis on p-site " + std::to_string(s));
        for (const auto& c : basis) (void)m.G_.index_of(c);  // validates residues
        m.p_sites_.push_back({s, std::move(basis)});
    }
    for (int s = 0; s < static_cast<int>(p1_bases.size()); ++s) {
        auto& basis = p1_bases[static_cast<std::size_t>(s)];
        if (basis.empty()) throw structural_error("empty basis on (p+1)-site " + std::to_string(s));
        for (const auto& g : basis) (void)m.G_.index_of(g);
        bool regular = basis.size() == all.size();
        if (regular)
            for (std::size_t i = 0; i < all.size(); ++i)
                if (!(basis[i] == all[i])) {
                    regular = false;
                    break;
                }
        m.p1_sites_.push_back({s, std::move(basis), regular});
    }
    m.finalize(dim_cap);
    return m;
}

void HilbertModel::finalize(std::int64_t dim_cap) {
    p_strides_.assign(p_sites_.size(), 1);
    p1_strides_.assign(p1_sites_.size(), 1);
    p_dim_ = p1_dim_ = 1;
    for (int i = static_cast<int>(p_sites_.size()) - 1; i >= 0; --i) {
        p_strides_[static_cast<std::size_t>(i)] = p_dim_;
        p_dim_ *= static_cast<std::int64_t>(p_sites_[static_cast<std::size_t>(i)].basis.size());
        if (p_dim_ > dim_cap) throw capability_error("p-register dimension exceeds cap");
    }
    for (int i = static_cast<int>(p1_sites_.size()) - 1; i >= 0; --i) {
        p1_strides_[static_cast<std::size_t>(i)] = p1_dim_;
        p1_dim_ *= static_cast<std::int64_t>(p1_sites_[static_cast<std::size_t>(i)].basis.size());
        if (p1_dim_ > dim_cap) throw capability_error("(p+1)-register dimension exceeds cap");
    }
    if (p_dim_ > dim_cap / p1_dim_)
        throw capability_error("Hilbert dimension " + std::to_string(p_dim_) + "*" +
                               std::to_string(p1_dim_) + " exceeds cap " + std::to_string(dim_cap));
    dim_ = p_dim_ * p1_dim_;
}

bool HilbertModel::all_regular() const {
    for (const auto& s : p1_sites_)
        if (!s.regular) return false;
    return true;
}

void HilbertModel::p_labels(std::int64_t p_index, std::vector<int>& out) const {
    out.resize(p_sites_.size());
    for (std::size_t i = 0; i < p_sites_.size(); ++i) {
        out[i] = static_cast<int>(p_index / p_strides_[i]);
        p_index %= p_strides_[i];
    }
}

void HilbertModel::p1_labels(std::int64_t p1_index, std::vector<int>& out) const {
    out.resize(p1_sites_.size());
    for (std::size_t i = 0; i < p1_sites_.size(); ++i) {
        out[i] = static_cast<int>(p1_index / p1_strides_[i]);
        p1_index %= p1_strides_[i];
    }
}

std::int64_t HilbertModel::p_index_of(const std::vector<int>& labels) const {
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < p_sites_.size(); ++i) idx += labels[i] * p_strides_[i];
    return idx;
}

std::int64_t HilbertModel::p1_index_of(const std::vector<int>& labels) const {
    std::int64_t idx = 0;
    for (std::size_t i = 0; i < p1_sites_.size(); ++i) idx += labels[i] * p1_strides_[i];
    return idx;
}

Chain HilbertModel::char_chain(std::int64_t p_index) const {
    Chain k;
    k.dim = p_;
    k.coef.reserve(p_sites_.size());
    std::vector<int> lab;
    p_labels(p_index, lab);
    for (std::size_t i = 0; i < p_sites_.size(); ++i)
        k.coef.push_back(p_sites_[i].basis[static_cast<std::size_t>(lab[i])]);
    return k;
}

Cochain HilbertModel::group_cochain(std::int64_t p1_index) const {
    Cochain f;
    f.dim = p_ + 1;
    f.val.reserve(p1_sites_.size());
    std::vector<int> lab;
    p1_labels(p1_index, lab);
    for (std::size_t i = 0; i < p1_sites_.size(); ++i)
        f.val.push_back(p1_sites_[i].basis[static_cast<std::size_t>(lab[i])]);
    return f;
}

ModVec HilbertModel::char_vec(std::int64_t p_index) const {
    const int r = G_.rank();
    ModVec v(p_sites_.size() * static_cast<std::size_t>(r));
    std::vector<int> lab;
    p_labels(p_index, lab);
    for (std::size_t i = 0; i < p_sites_.size(); ++i) {
        const auto& c = p_sites_[i].basis[static_cast<std::size_t>(lab[i])];
        for (int j = 0; j < r; ++j)
            v[i * static_cast<std::size_t>(r) + static_cast<std::size_t>(j)] =
                c.res[static_cast<std::size_t>(j)];
    }
    return v;
}

ModVec HilbertModel::group_vec(std::int64_t p1_index) const {
    const int r = G_.rank();
    ModVec v(p1_sites_.size() * static_cast<std::size_t>(r));
    std::vector<int> lab;
    p1_labels(p1_index, lab);
    for (std::size_t i = 0; i < p1_sites_.size(); ++i) {
        const auto& g = p1_sites_[i].basis[static_cast<std::size_t>(lab[i])];
        for (int j = 0; j < r; ++j)
            v[i * static_cast<std::size_t>(r) + static_cast<std::size_t>(j)] =
                g.res[static_cast<std::size_t>(j)];
    }
    return v;
}

std::vector<std::int64_t> HilbertModel::site_dims() const {
    std::vector<std::int64_t> d;
    d.reserve(p_sites_.size() + p1_sites_.size());
    for (const auto& s : p_sites_) d.push_back(static_cast<std::int64_t>(s.basis.size()));
    for (const auto& s : p1_sites_) d.push_back(static_cast<std::int64_t>(s.basis.size()));
    return d;
}

DiagOp DiagOp::identity(std::int64_t n) {
    DiagOp d;
    d.keep.assign(static_cast<std::size_t>(n), 1);
    d.ph.assign(static_cast<std::size_t>(n), Angle{});
    return d;
}

DiagOp DiagOp::operator*(const DiagOp& o) const {
    if (keep.size() != o.keep.size()) throw structural_error("diagonal size mismatch");
    DiagOp r;
    r.keep.resize(keep.size());
    r.ph.resize(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        r.keep[i] = keep[i] && o.keep[i];
        r.ph[i] = r.keep[i] ? ph[i] + o.ph[i] : Angle{};
    }
    return r;
}

DiagOp DiagOp::adjoint() const {
    DiagOp r = *this;
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (keep[i]) r.ph[i] = -ph[i];
    return r;
}

bool DiagOp::operator==(const DiagOp& o) const {
    if (keep.size() != o.keep.size()) return false;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] != o.keep[i]) return false;
        if (keep[i] && !(ph[i] == o.ph[i])) return false;
    }
    return true;
}

std::complex<double> DiagOp::amplitude(std::int64_t i) const {
    const auto u = static_cast<std::size_t>(i);
    return keep[u] ? ph[u].unit() : std::complex<double>{0.0, 0.0};
}

Eigen::VectorXcd DiagOp::amplitudes() const {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = amplitude(static_cast<std::int64_t>(i));
    return v;
}

void DiagOp::apply_in_place(StateVector& v) const {
    if (static_cast<std::size_t>(v.size()) != keep.size())
        throw structural_error("diagonal/state size mismatch");
    for (std::size_t i = 0; i < keep.size(); ++i)
        v[static_cast<Eigen::Index>(i)] *= amplitude(static_cast<std::int64_t>(i));
}

SparseOp DiagOp::to_sparse() const {
    SparseOp m(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
    std::vector<Eigen::Triplet<std::complex<double>>> trips;
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (keep[i])
            trips.emplace_back(static_cast<int>(i), static_cast<int>(i), ph[i].unit());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

double DiagOp::norm_diff(const DiagOp& o) const {
    if (keep.size() != o.keep.size()) throw structural_error("diagonal size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] == o.keep[i] && (!keep[i] || ph[i] == o.ph[i])) continue;  // exactly equal
        worst = std::max(worst, std::abs(amplitude(static_cast<std::int64_t>(i)) -
                                         o.amplitude(static_cast<std::int64_t>(i))));
    }
    return worst;
}

PermOp PermOp::identity(std::int64_t n) {
    PermOp p;
    p.dst.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) p.dst[static_cast<std::size_t>(i)] = i;
    p.ph.assign(static_cast<std::size_t>(n), Angle{});
    return p;
}

PermOp PermOp::operator*(const PermOp& o) const {
    if (dst.size() != o.dst.size()) throw structural_error("permutation size mismatch");
    PermOp r;
    r.dst.resize(dst.size());
    r.ph.resize(dst.size());
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const auto mid = static_cast<std::size_t>(o.dst[i]);
        r.dst[i] = dst[mid];
        r.ph[i] = o.ph[i] + ph[mid];
    }
    return r;
}

PermOp PermOp::adjoint() const {
    PermOp r;
    r.dst.resize(dst.size());
    r.ph.resize(dst.size());
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const auto d = static_cast<std::size_t>(dst[i]);
        r.dst[d] = static_cast<std::int64_t>(i);
        r.ph[d] = -ph[i];
    }
    return r;
}

bool PermOp::operator==(const PermOp& o) const { return dst == o.dst && ph == o.ph; }

StateVector PermOp::apply(const StateVector& v) const {
    if (static_cast<std::size_t>(v.size()) != dst.size())
        throw structural_error("permutation/state size mismatch");
    StateVector out = StateVector::Zero(v.size());
    for (std::size_t i = 0; i < dst.size(); ++i)
        out[static_cast<Eigen::Index>(dst[i])] += ph[i].unit() * v[static_cast<Eigen::Index>(i)];
    return out;
}

SparseOp PermOp::to_sparse() const {
    SparseOp m(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(dst.size()));
    std::vector<Eigen::Triplet<std::complex<double>>> trips;
    trips.reserve(dst.size());
    for (std::size_t i = 0; i < dst.size(); ++i)
        trips.emplace_back(static_cast<int>(dst[i]), static_cast<int>(i), ph[i].unit());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

PermOp compose(const DiagOp& d, const PermOp& t) {
    if (d.keep.size() != t.dst.size()) throw structural_error("operator size mismatch");
    PermOp r = t;
    for (std::size_t i = 0; i < t.dst.size(); ++i) {
        const auto out = static_cast<std::size_t>(t.dst[i]);
        if (!d.keep[out]) throw structural_error("diagonal after permutation is not phase-only");
        r.ph[i] = t.ph[i] + d.ph[out];
    }
    return r;
}

PermOp compose(const PermOp& t, const DiagOp& d) {
    if (d.keep.size() != t.dst.size()) throw structural_error("operator size mismatch");
    PermOp r = t;
    for (std::size_t i = 0; i < t.dst.size(); ++i) {
        if (!d.keep[i]) throw structural_error("permutation after diagonal is not phase-only");
        r.ph[i] = d.ph[i] + t.ph[i];
    }
    return r;
}

double frob_norm(const SparseOp& a) {
    double s = 0.0;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseOp::InnerIterator it(a, k); it; ++it) s += std::norm(it.value());
    return std::sqrt(s);
}

double op_norm_diff(const SparseOp& a, const SparseOp& b) {
    SparseOp d = a - b;
    d.prune([](const auto&, const auto&, const auto& v) { return std::norm(v) > 0.0; });
    return frob_norm(d);
}

SparseOp kron(const SparseOp& a, const SparseOp& b) {
    SparseOp r(a.rows() * b.rows(), a.cols() * b.cols());
    std::vector<Eigen::Triplet<std::complex<double>>> trips;
    trips.reserve(static_cast<std::size_t>(a.nonZeros()) * static_cast<std::size_t>(b.nonZeros()));
    for (int ka = 0; ka < a.outerSize(); ++ka)
        for (SparseOp::InnerIterator ia(a, ka); ia; ++ia)
            for (int kb = 0; kb < b.outerSize(); ++kb)
                for (SparseOp::InnerIterator ib(b, kb); ib; ++ib)
                    trips.emplace_back(static_cast<int>(ia.row() * b.rows() + ib.row()),
                                       static_cast<int>(ia.col() * b.cols() + ib.col()),
                                       ia.value() * ib.value());
    r.setFromTriplets(trips.begin(), trips.end());
    return r;
}

SparseOp sparse_identity(std::int64_t n) {
    SparseOp m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setIdentity();
    return m;
}

SparseOp lift_p(const HilbertModel& m, const SparseOp& op) {
    if (op.rows() != m.p_dim() || op.cols() != m.p_dim())
        throw structural_error("operator is not on the p-register");
    return kron(op, sparse_identity(m.p1_dim()));
}

SparseOp lift_p1(const HilbertModel& m, const SparseOp& op) {
    if (op.rows() != m.p1_dim() || op.cols() != m.p1_dim())
        throw structural_error("operator is not on the (p+1)-register");
    return kron(sparse_identity(m.p_dim()), op);
}

}  // namespace hfent
