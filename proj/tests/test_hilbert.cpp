#include <doctest.h>

#include <memory>
#include <random>

#include "hfent/complex.hpp"
#include "hfent/error.hpp"
#include "hfent/group.hpp"
#include "hfent/hilbert.hpp"

using namespace hfent;

namespace {

std::shared_ptr<const DeltaComplex> lib(const char* n) {
    return std::make_shared<const DeltaComplex>(library_complex(n));
}

DiagOp random_diag(std::int64_t n, std::mt19937_64& rng, bool projector) {
    DiagOp d;
    d.keep.resize(static_cast<std::size_t>(n));
    d.ph.resize(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        d.keep[static_cast<std::size_t>(i)] = projector ? (rng() % 2 == 0) : 1;
        d.ph[static_cast<std::size_t>(i)] =
            Angle::turns(static_cast<std::int64_t>(rng() % 12), 12);
    }
    return d;
}

PermOp random_perm(std::int64_t n, std::mt19937_64& rng) {
    PermOp t = PermOp::identity(n);
    for (std::int64_t i = n - 1; i > 0; --i)
        std::swap(t.dst[static_cast<std::size_t>(i)],
                  t.dst[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(i + 1))]);
    for (auto& a : t.ph) a = Angle::turns(static_cast<std::int64_t>(rng() % 8), 8);
    return t;
}

}  // namespace

TEST_SUITE("hilbert") {

TEST_CASE("regular model dimensions") {
    const HilbertModel m = HilbertModel::regular(lib("circle_3"), FiniteAbelianGroup({2}), 0);
    CHECK(m.p() == 0);
    CHECK(m.n_p_sites() == 3);
    CHECK(m.n_p1_sites() == 3);
    CHECK(m.p_dim() == 8);
    CHECK(m.p1_dim() == 8);
    CHECK(m.dim() == 64);
    CHECK(m.all_regular());

    const HilbertModel t = HilbertModel::regular(lib("torus_delta"), FiniteAbelianGroup({4}), 1);
    CHECK(t.p_dim() == 64);
    CHECK(t.p1_dim() == 16);
    CHECK(t.dim() == 1024);
    CHECK(t.site_dims() == std::vector<std::int64_t>({4, 4, 4, 4, 4}));
}

TEST_CASE("index round trips and label decoding") {
    const HilbertModel m = HilbertModel::regular(lib("circle_3"), FiniteAbelianGroup({2}), 0);
    std::vector<int> lab;
    for (std::int64_t i = 0; i < m.p_dim(); ++i) {
        m.p_labels(i, lab);
        CHECK(m.p_index_of(lab) == i);
    }
    for (std::int64_t j = 0; j < m.p1_dim(); ++j) {
        m.p1_labels(j, lab);
        CHECK(m.p1_index_of(lab) == j);
    }
    for (std::int64_t g = 0; g < m.dim(); ++g)
        CHECK(m.global_index(m.p_index(g), m.p1_index(g)) == g);

    // char/group vectors invert the label maps
    for (std::int64_t i = 0; i < m.p_dim(); ++i) {
        const Chain k = m.char_chain(i);
        CHECK(k.dim == 0);
        m.p_labels(i, lab);
        for (int s = 0; s < m.n_p_sites(); ++s)
            CHECK(k.coef[static_cast<std::size_t>(m.p_site(s).simplex)] ==
                  m.group().character(lab[static_cast<std::size_t>(s)]));
    }
}

TEST_CASE("custom bases: multiplicity, truncation, errors") {
    const FiniteAbelianGroup G({2});
    auto X = lib("circle_3");
    const Character c0 = G.character(0), c1 = G.character(1);
    const GroupElement e0 = G.element(0);
    const HilbertModel m = HilbertModel::custom(
        X, G, 0, {{c0}, {c0, c1}, {c1, c1}}, {{e0}, {e0}, {e0}});
    CHECK(m.p_dim() == 4);
    CHECK(m.p1_dim() == 1);
    CHECK_FALSE(m.all_regular());
    std::vector<int> lab;
    for (std::int64_t i = 0; i < m.p_dim(); ++i) {
        m.p_labels(i, lab);
        CHECK(m.p_index_of(lab) == i);
    }
    // duplicate labels on site 2 mean distinct states share a character
    CHECK(m.char_vec(2) == m.char_vec(3));

    CHECK_THROWS_AS(
        HilbertModel::custom(X, G, 0, {{c0}, {}, {c0}}, {{e0}, {e0}, {e0}}), Error);
    CHECK_THROWS_AS(
        HilbertModel::custom(X, G, 0, {{c0}}, {{e0}, {e0}, {e0}}), Error);
}

TEST_CASE("dimension cap rejects oversized spaces") {
    CHECK(default_dim_cap() == (std::int64_t{1} << 22));
    CHECK_THROWS_AS(HilbertModel::regular(lib("circle_8"), FiniteAbelianGroup({4}), 0), Error);
    CHECK_NOTHROW(HilbertModel::regular(lib("circle_8"), FiniteAbelianGroup({4}), 0,
                                        std::int64_t{1} << 33));
}

TEST_CASE("diagonal algebra matches dense arithmetic") {
    std::mt19937_64 rng(2);
    const std::int64_t n = 24;
    for (int rep = 0; rep < 5; ++rep) {
        const DiagOp a = random_diag(n, rng, true), b = random_diag(n, rng, false);
        // angles compose exactly; the dense route rounds through doubles
        CHECK(op_norm_diff(SparseOp((a * b).to_sparse()),
                           SparseOp(a.to_sparse() * b.to_sparse())) <= 1e-12);
        CHECK(op_norm_diff(a.adjoint().to_sparse(), SparseOp(a.to_sparse().adjoint())) <= 1e-12);
        CHECK(a * DiagOp::identity(n) == a);
        CHECK(a.norm_diff(a) == 0.0);
        // norm_diff is the sup over entries, op_norm_diff the Frobenius norm
        const double sup = (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff();
        CHECK(std::abs(a.norm_diff(b) - sup) <= 1e-13);
        CHECK(a.norm_diff(b) <= op_norm_diff(a.to_sparse(), b.to_sparse()) + 1e-13);
        // unitary part: d d* = identity on the kept set
        const DiagOp u = random_diag(n, rng, false);
        CHECK(u * u.adjoint() == DiagOp::identity(n));
    }
}

TEST_CASE("permutation algebra: composition order, unitarity") {
    std::mt19937_64 rng(6);
    const std::int64_t n = 16;
    for (int rep = 0; rep < 5; ++rep) {
        const PermOp s = random_perm(n, rng), t = random_perm(n, rng);
        CHECK(op_norm_diff(SparseOp((s * t).to_sparse()),
                           SparseOp(s.to_sparse() * t.to_sparse())) <= 1e-12);
        CHECK(s * s.adjoint() == PermOp::identity(n));
        CHECK(s.adjoint() * s == PermOp::identity(n));

        StateVector v = StateVector::Random(n);
        CHECK((s.apply(v) - s.to_sparse() * v).norm() < 1e-14);

        const DiagOp d = random_diag(n, rng, false);
        CHECK(op_norm_diff(compose(d, s).to_sparse(),
                           SparseOp(d.to_sparse() * s.to_sparse())) <= 1e-12);
        CHECK(op_norm_diff(compose(s, d).to_sparse(),
                           SparseOp(s.to_sparse() * d.to_sparse())) <= 1e-12);
    }
    // a proper projector removes amplitude, so it cannot ride on a permutation
    std::mt19937_64 rng2(7);
    DiagOp pr = random_diag(n, rng2, true);
    pr.keep[0] = 0;
    CHECK_THROWS_AS(compose(pr, random_perm(n, rng2)), Error);
}

TEST_CASE("apply_in_place agrees with the sparse matrix") {
    std::mt19937_64 rng(8);
    const std::int64_t n = 20;
    const DiagOp d = random_diag(n, rng, true);
    StateVector v = StateVector::Random(n);
    const StateVector want = d.to_sparse() * v;
    StateVector got = v;
    d.apply_in_place(got);
    CHECK((got - want).norm() == 0.0);
}

TEST_CASE("register lifts are Kronecker factors") {
    const HilbertModel m = HilbertModel::regular(lib("circle_3"), FiniteAbelianGroup({2}), 0);
    std::mt19937_64 rng(12);
    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    for (int e = 0; e < 6; ++e)
        trip.emplace_back(static_cast<int>(rng() % 8), static_cast<int>(rng() % 8),
                          std::complex<double>(1.0, -0.5));
    SparseOp O(m.p_dim(), m.p_dim());
    O.setFromTriplets(trip.begin(), trip.end());
    CHECK(op_norm_diff(lift_p(m, O), kron(O, sparse_identity(m.p1_dim()))) == 0.0);
    SparseOp Og(m.p1_dim(), m.p1_dim());
    Og.setFromTriplets(trip.begin(), trip.end());
    CHECK(op_norm_diff(lift_p1(m, Og), kron(sparse_identity(m.p_dim()), Og)) == 0.0);
    CHECK_THROWS_AS(lift_p(m, Og.block(0, 0, 4, 4).eval()), Error);
}

}
