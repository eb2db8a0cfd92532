#include <doctest.h>

#include <memory>
#include <random>

#include "hfent/complex.hpp"
#include "hfent/error.hpp"
#include "hfent/group.hpp"
#include "hfent/hilbert.hpp"
#include "hfent/homology.hpp"
#include "hfent/operators.hpp"

using namespace hfent;

namespace {

std::shared_ptr<const DeltaComplex> lib(const char* n) {
    return std::make_shared<const DeltaComplex>(library_complex(n));
}

HilbertModel circle3_z2() {
    return HilbertModel::regular(lib("circle_3"), FiniteAbelianGroup({2}), 0);
}

HilbertModel sphere_z2_p1() {
    return HilbertModel::regular(lib("sphere_tetra"), FiniteAbelianGroup({2}), 1);
}

Cochain cochain_at(const HilbertModel& m, int n, const ModVec& v) {
    return vec_to_cochain(m.group(), n, v);
}

Chain chain_at(const HilbertModel& m, int n, const ModVec& v) {
    return vec_to_chain(m.group(), n, v);
}

SparseOp random_matter_op(const HilbertModel& m, std::mt19937_64& rng) {
    std::vector<Eigen::Triplet<std::complex<double>>> trip;
    for (int e = 0; e < 10; ++e)
        trip.emplace_back(static_cast<int>(rng() % static_cast<std::uint64_t>(m.p_dim())),
                          static_cast<int>(rng() % static_cast<std::uint64_t>(m.p_dim())),
                          std::complex<double>(static_cast<double>(rng() % 7) - 3.0,
                                               static_cast<double>(rng() % 5) - 2.0));
    SparseOp O(m.p_dim(), m.p_dim());
    O.setFromTriplets(trip.begin(), trip.end());
    return O;
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("symmetry operator scales sector projectors by the exact pairing") {
    const HilbertModel m = circle3_z2();
    const FiniteAbelianGroup& G = m.group();
    const SubgroupModM Zp = cocycles(m.complex(), G, 0);
    for (std::int64_t zi = 0; zi < Zp.order(); ++zi) {
        const Cochain phi = cochain_at(m, 0, Zp.element_at(zi));
        const DiagOp u = sym_op(m, phi);
        for (std::int64_t pi = 0; pi < m.p_dim(); ++pi) {
            const Chain k = m.char_chain(pi);
            const DiagOp pk = projector_P(m, k);
            DiagOp want = pk;
            const Angle shift = pairing(G, k, phi);
            for (auto& a : want.ph) a = a + shift;
            CHECK(u * pk == want);
        }
    }
    // non-closed cochains are rejected by the symmetry constructor
    auto Xi = lib("interval_3");
    const HilbertModel mi = HilbertModel::regular(Xi, FiniteAbelianGroup({2}), 0);
    Cochain bad = zero_cochain(*Xi, FiniteAbelianGroup({2}), 0);
    bad.val[0] = FiniteAbelianGroup({2}).element(1);
    CHECK_THROWS_AS(sym_op(mi, bad), Error);
    CHECK_NOTHROW(matter_phase(mi, bad));
}

TEST_CASE("sector projectors resolve the identity") {
    const HilbertModel m = circle3_z2();
    SparseOp acc(m.dim(), m.dim());
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi)
        acc = SparseOp(acc + projector_P(m, m.char_chain(pi)).to_sparse());
    CHECK(op_norm_diff(acc, sparse_identity(m.dim())) == 0.0);
}

TEST_CASE("wilson and thooft operators satisfy the exchange relation exactly") {
    const HilbertModel m = circle3_z2();
    const FiniteAbelianGroup& G = m.group();
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 12; ++rep) {
        ModVec kv(static_cast<std::size_t>(m.complex().count(1)));
        ModVec fv(kv.size());
        for (auto& x : kv) x = static_cast<std::int64_t>(rng() % 2);
        for (auto& x : fv) x = static_cast<std::int64_t>(rng() % 2);
        const Chain kp = chain_at(m, 1, kv);
        const Cochain fp = cochain_at(m, 1, fv);
        const DiagOp w = wilson_op(m, kp);
        const PermOp t = thooft_op(m, fp);
        // U~(k') T~(phi') = e^{i<k',phi'>} T~(phi') U~(k')
        PermOp rhs = compose(t, w);
        const Angle ph = pairing(G, kp, fp);
        for (auto& a : rhs.ph) a = a + ph;
        CHECK(compose(w, t) == rhs);
    }
}

TEST_CASE("thooft needs regular gauge sites") {
    auto X = lib("circle_3");
    const FiniteAbelianGroup G({2});
    const GroupElement e0 = G.element(0);
    const Character c0 = G.character(0), c1 = G.character(1);
    const HilbertModel m = HilbertModel::custom(
        X, G, 0, {{c0, c1}, {c0, c1}, {c0, c1}}, {{e0}, {e0}, {e0}});
    Cochain phip = zero_cochain(*X, G, 1);
    phip.val[0] = G.element(1);
    CHECK_THROWS_AS(thooft_op(m, phip), Error);
}

TEST_CASE("invariant projector is idempotent and factors into the two layers") {
    for (const HilbertModel& m : {circle3_z2(), sphere_z2_p1()}) {
        const DiagOp ps = projector_sym(m), pd = projector_sym_dual(m);
        const DiagOp pinv = projector_inv(m);
        CHECK(pinv == ps * pd);
        CHECK(pinv * pinv == pinv);
        for (const auto a : pinv.ph) CHECK(a.is_zero());
    }
}

TEST_CASE("symmetric projector equals the joint fixed space of the symmetry") {
    for (const HilbertModel& m : {circle3_z2(), sphere_z2_p1()}) {
        CHECK(projector_sym(m) == projector_fixed_matter(m));
        CHECK(projector_sym_dual(m) == projector_fixed_gauge(m));
        // every symmetry operator acts as the identity on the range
        const DiagOp ps = projector_sym(m);
        const SubgroupModM Zp = cocycles(m.complex(), m.group(), m.p());
        for (std::int64_t i = 0; i < Zp.order(); ++i) {
            const DiagOp u = sym_op(m, vec_to_cochain(m.group(), m.p(), Zp.element_at(i)));
            CHECK(u * ps == ps);
        }
        const DiagOp pd = projector_sym_dual(m);
        const SubgroupModM Zd = cycles(m.complex(), m.group(), m.p() + 1);
        for (std::int64_t i = 0; i < Zd.order(); ++i) {
            const DiagOp u = sym_op_dual(m, vec_to_chain(m.group(), m.p() + 1, Zd.element_at(i)));
            CHECK(u * pd == pd);
        }
    }
}

TEST_CASE("charge sectors add and detect homology classes") {
    const HilbertModel m = HilbertModel::regular(lib("torus_delta"), FiniteAbelianGroup({2}), 1);
    const FiniteAbelianGroup& G = m.group();
    for (std::int64_t i = 0; i < m.p_dim(); ++i)
        for (std::int64_t j = 0; j < m.p_dim(); ++j) {
            const Chain a = m.char_chain(i), b = m.char_chain(j);
            const ChargeSector sa = charge_sector(m, a), sb = charge_sector(m, b);
            const ChargeSector sum = charge_sector(m, add(G, a, b));
            REQUIRE(sa.sector.size() == sum.sector.size());
            for (std::size_t t = 0; t < sum.sector.size(); ++t)
                CHECK(sum.sector[t] == (sa.sector[t] + sb.sector[t]) % sa.sector_factors[t]);
        }
    // cycles carry a homology class, non-cycles do not
    const Chain cyc = homology(m.complex(), G, 1).representative_chains()[0];
    CHECK(charge_sector(m, cyc).homology_class.has_value());
    const HilbertModel ms = sphere_z2_p1();
    Chain open = zero_chain(ms.complex(), ms.group(), 1);
    open.coef[0] = ms.group().character(1);
    REQUIRE_FALSE(is_zero(boundary(ms.complex(), ms.group(), open)));
    CHECK_FALSE(charge_sector(ms, open).homology_class.has_value());
}

TEST_CASE("minimal coupling: partial isometry with the symmetric range") {
    for (const HilbertModel& m : {circle3_z2(), sphere_z2_p1()}) {
        const DiagOp U = minimal_coupling(m);
        const DiagOp pinv = projector_inv(m);
        // U^dag U is the matter-boundary-sector projector; on the invariant
        // subspace it is the identity.
        CHECK(U.adjoint() * U * pinv == pinv);
        // kept configurations are exactly the boundary charge sectors
        const BoundarySection sec(m.complex(), m.group(), m.p());
        for (std::int64_t g = 0; g < m.dim(); ++g) {
            const bool want = sec.contains(chain_to_vec(m.group(), m.char_chain(m.p_index(g))));
            CHECK(static_cast<bool>(U.keep[static_cast<std::size_t>(g)]) == want);
        }
    }
}

TEST_CASE("preimage ambiguity is invisible on the invariant subspace") {
    for (const HilbertModel& m : {circle3_z2(), sphere_z2_p1()}) {
        const DiagOp U = minimal_coupling(m);
        const DiagOp pinv = projector_inv(m);
        const SubgroupModM Z = cycles(m.complex(), m.group(), m.p() + 1);
        bool shifted_once = false;
        for (std::int64_t i = 0; i < Z.order(); ++i) {
            const Chain z = vec_to_chain(m.group(), m.p() + 1, Z.element_at(i));
            const DiagOp U2 = minimal_coupling_shifted(m, z);
            CHECK(U * pinv == U2 * pinv);
            if (!is_zero(z)) {
                shifted_once = true;
                CHECK_FALSE(U == U2);  // off the range the choices differ
            }
        }
        CHECK(shifted_once);
    }
}

TEST_CASE("dual coupling equals minimal coupling on the invariant subspace") {
    for (const HilbertModel& m : {circle3_z2(), sphere_z2_p1()}) {
        const DiagOp pinv = projector_inv(m);
        CHECK((dual_coupling(m) * pinv).norm_diff(minimal_coupling(m) * pinv) == 0.0);
    }
}

TEST_CASE("conjugation routes agree, and the identity maps to the projector") {
    std::mt19937_64 rng(21);
    const HilbertModel m1 = circle3_z2();
    const HilbertModel m2 = HilbertModel::regular(lib("torus_delta"), FiniteAbelianGroup({4}), 1);
    for (const HilbertModel* m : {&m1, &m2}) {
        for (int rep = 0; rep < 4; ++rep) {
            const SparseOp O = random_matter_op(*m, rng);
            CHECK(op_norm_diff(conjugate_direct(*m, O), conjugate_decomposed(*m, O)) <= 1e-13);
        }
        const DiagOp U = minimal_coupling(*m);
        const SparseOp want = (U * U.adjoint()).to_sparse();
        CHECK(op_norm_diff(conjugate(*m, sparse_identity(m->p_dim())), want) == 0.0);
    }
}

TEST_CASE("charge components: completeness and the intertwining relation") {
    const HilbertModel m = circle3_z2();
    std::mt19937_64 rng(31);
    const SparseOp O = random_matter_op(m, rng);
    const auto comps = decompose_components(m, O);
    SparseOp acc(m.p_dim(), m.p_dim());
    for (const auto& [q, oq] : comps) acc = SparseOp(acc + oq);
    CHECK(op_norm_diff(acc, O) == 0.0);

    const ModVec moduli = chain_moduli(m.complex(), m.group(), m.p());
    for (const auto& [q, oq] : comps)
        for (std::int64_t pi = 0; pi < m.p_dim(); ++pi) {
            // P(k) O_q = O_q P(k-q) verified on the matter register
            const ModVec k = m.char_vec(pi);
            ModVec km(k.size());
            for (std::size_t t = 0; t < k.size(); ++t)
                km[t] = ((k[t] - q[t]) % moduli[t] + moduli[t]) % moduli[t];
            Eigen::VectorXcd dk = Eigen::VectorXcd::Zero(m.p_dim()),
                             dkm = Eigen::VectorXcd::Zero(m.p_dim());
            for (std::int64_t pj = 0; pj < m.p_dim(); ++pj) {
                if (m.char_vec(pj) == k) dk[pj] = 1.0;
                if (m.char_vec(pj) == km) dkm[pj] = 1.0;
            }
            const SparseOp lhs = SparseOp(dk.asDiagonal().toDenseMatrix().sparseView()) * oq;
            const SparseOp rhs = oq * SparseOp(dkm.asDiagonal().toDenseMatrix().sparseView());
            CHECK(op_norm_diff(lhs, rhs) == 0.0);
        }

    // a diagonal operator has only the zero component
    SparseOp D(m.p_dim(), m.p_dim());
    std::vector<Eigen::Triplet<std::complex<double>>> dt;
    for (std::int64_t i = 0; i < m.p_dim(); ++i)
        dt.emplace_back(static_cast<int>(i), static_cast<int>(i),
                        std::complex<double>(static_cast<double>(i), 0.0));
    D.setFromTriplets(dt.begin(), dt.end());
    const auto dcomp = decompose_components(m, D);
    CHECK(dcomp.size() == 1);
    CHECK(dcomp.begin()->first == ModVec(3, 0));
}

TEST_CASE("components pick up the exact phase under the symmetry") {
    const HilbertModel m = circle3_z2();
    const FiniteAbelianGroup& G = m.group();
    std::mt19937_64 rng(41);
    const SparseOp O = random_matter_op(m, rng);
    const SubgroupModM Zp = cocycles(m.complex(), G, 0);
    for (const auto& [q, oq] : decompose_components(m, O)) {
        const SparseOp oq_full = lift_p(m, oq);
        for (std::int64_t i = 0; i < Zp.order(); ++i) {
            const Cochain phi = vec_to_cochain(G, 0, Zp.element_at(i));
            const SparseOp u = sym_op(m, phi).to_sparse();
            const Angle ph = pairing(G, vec_to_chain(G, 0, q), phi);
            CHECK(op_norm_diff(SparseOp(u * oq_full),
                               SparseOp(ph.unit() * SparseOp(oq_full * u))) <= 1e-14);
        }
    }
}

TEST_CASE("gauge transformations form a group and reduce to the symmetry") {
    const HilbertModel m = circle3_z2();
    const FiniteAbelianGroup& G = m.group();
    std::mt19937_64 rng(51);
    for (int rep = 0; rep < 10; ++rep) {
        ModVec v1(3), v2(3);
        for (auto& x : v1) x = static_cast<std::int64_t>(rng() % 2);
        for (auto& x : v2) x = static_cast<std::int64_t>(rng() % 2);
        const Cochain f1 = vec_to_cochain(G, 0, v1), f2 = vec_to_cochain(G, 0, v2);
        CHECK(gauge_transformation(m, f1) * gauge_transformation(m, f2) ==
              gauge_transformation(m, add(G, f1, f2)));
    }
    CHECK(gauge_transformation(m, zero_cochain(m.complex(), G, 0)) ==
          PermOp::identity(m.dim()));
    const SubgroupModM Zp = cocycles(m.complex(), G, 0);
    for (std::int64_t i = 0; i < Zp.order(); ++i) {
        const Cochain phi = vec_to_cochain(G, 0, Zp.element_at(i));
        CHECK(op_norm_diff(gauge_transformation(m, phi).to_sparse(),
                           sym_op(m, phi).to_sparse()) == 0.0);
    }
}

TEST_CASE("gauging a state: projection, naturality, constant norm") {
    const HilbertModel m = circle3_z2();
    const BoundarySection sec(m.complex(), m.group(), m.p());
    std::mt19937_64 rng(61);

    // a single non-boundary charge sector is annihilated
    std::int64_t bad_pi = -1;
    for (std::int64_t pi = 0; pi < m.p_dim(); ++pi)
        if (!sec.contains(m.char_vec(pi))) {
            bad_pi = pi;
            break;
        }
    REQUIRE(bad_pi >= 0);
    StateVector nonsym = StateVector::Zero(m.p_dim());
    nonsym[bad_pi] = 1.0;
    CHECK(gauge_state(m, nonsym).norm() <= 1e-15);

    // symmetric states: naturality against conjugation, norm independence
    const auto random_symmetric = [&] {
        StateVector psi = StateVector::Zero(m.p_dim());
        for (std::int64_t pi = 0; pi < m.p_dim(); ++pi)
            if (sec.contains(m.char_vec(pi)))
                psi[pi] = std::complex<double>(static_cast<double>(rng() % 17) - 8.0,
                                               static_cast<double>(rng() % 17) - 8.0);
        psi.normalize();
        return psi;
    };
    const double n0 = gauge_state(m, random_symmetric()).norm();
    for (int rep = 0; rep < 6; ++rep) {
        const StateVector psi = random_symmetric();
        CHECK(gauge_state(m, psi).norm() == doctest::Approx(n0).epsilon(1e-12));
        const SparseOp O = random_matter_op(m, rng);
        const StateVector lhs = gauge_state(m, StateVector(O * psi));
        const StateVector rhs = conjugate(m, O) * gauge_state(m, psi);
        CHECK((lhs - rhs).norm() <= 1e-12);
    }
}

TEST_CASE("gauging an operator: identity case and agreement on the range") {
    const HilbertModel m = circle3_z2();
    std::mt19937_64 rng(71);
    const DiagOp pinv = projector_inv(m);

    // the identity gauges to the coboundary-config projector on the gauge layer
    const SparseOp gid = gauge_operator_prime(m, sparse_identity(m.p_dim()));
    CHECK(op_norm_diff(gid, projector_sym_dual(m).to_sparse()) <= 1e-15);

    for (int rep = 0; rep < 6; ++rep) {
        const SparseOp O = random_matter_op(m, rng);
        CHECK(op_norm_diff(SparseOp(gauge_operator_prime(m, O) * pinv.to_sparse()),
                           SparseOp(conjugate(m, O) * pinv.to_sparse())) <= 1e-12);
    }
}

}
