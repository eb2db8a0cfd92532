#include <doctest.h>

#include <memory>
#include <set>

#include "hfent/complex.hpp"
#include "hfent/error.hpp"
#include "hfent/group.hpp"
#include "hfent/homology.hpp"
#include "hfent/zmod.hpp"

using namespace hfent;

namespace {

// Odometer over all n-chains; |G|^count(n) must stay small.
struct ChainScan {
    const DeltaComplex& X;
    const FiniteAbelianGroup& G;
    int n;

    template <typename F>
    void run(F&& body) const {
        const int cnt = X.count(n);
        std::vector<std::int64_t> idx(static_cast<std::size_t>(cnt), 0);
        while (true) {
            Chain c = zero_chain(X, G, n);
            for (int i = 0; i < cnt; ++i)
                c.coef[static_cast<std::size_t>(i)] = G.character(idx[static_cast<std::size_t>(i)]);
            body(c);
            int s = cnt - 1;
            for (; s >= 0; --s) {
                auto& v = idx[static_cast<std::size_t>(s)];
                if (++v < G.order()) break;
                v = 0;
            }
            if (s < 0) break;
        }
    }
};

std::vector<std::int64_t> factors_of(const DeltaComplex& X, const FiniteAbelianGroup& G, int n,
                                     bool co) {
    return co ? cohomology(X, G, n).factors() : homology(X, G, n).factors();
}

}  // namespace

TEST_SUITE("homology") {

TEST_CASE("cycle and boundary subgroups match exhaustive enumeration") {
    for (const char* cn : {"circle_3", "triangle_disk", "torus_delta", "two_triangles_sphere"}) {
        const DeltaComplex X = library_complex(cn);
        for (const auto& G : {FiniteAbelianGroup({2}), FiniteAbelianGroup({4})}) {
            for (int n = 0; n <= X.dimension(); ++n) {
                const SubgroupModM Z = cycles(X, G, n);
                std::int64_t zcount = 0;
                ChainScan{X, G, n}.run([&](const Chain& c) {
                    const bool cyc = n == 0 || is_zero(boundary(X, G, c));
                    if (cyc) ++zcount;
                    CHECK(Z.contains(chain_to_vec(G, c)) == cyc);
                });
                CHECK(Z.order() == zcount);
            }
            for (int n = 0; n < X.dimension(); ++n) {
                const SubgroupModM B = boundaries(X, G, n);
                std::set<ModVec> image;
                ChainScan{X, G, n + 1}.run([&](const Chain& c) {
                    image.insert(chain_to_vec(G, boundary(X, G, c)));
                });
                CHECK(B.order() == static_cast<std::int64_t>(image.size()));
                for (const auto& v : image) CHECK(B.contains(v));
            }
        }
    }
}

TEST_CASE("homology tables for the library") {
    using V = std::vector<std::int64_t>;
    const DeltaComplex circle = library_complex("circle_3");
    CHECK(factors_of(circle, FiniteAbelianGroup({2}), 0, false) == V{2});
    CHECK(factors_of(circle, FiniteAbelianGroup({2}), 1, false) == V{2});
    CHECK(factors_of(circle, FiniteAbelianGroup({3}), 1, false) == V{3});
    CHECK(factors_of(circle, FiniteAbelianGroup({2, 4}), 1, false) == V({2, 4}));

    const DeltaComplex sphere = library_complex("sphere_tetra");
    CHECK(factors_of(sphere, FiniteAbelianGroup({2}), 0, false) == V{2});
    CHECK(factors_of(sphere, FiniteAbelianGroup({2}), 1, false) == V{});
    CHECK(factors_of(sphere, FiniteAbelianGroup({2}), 2, false) == V{2});
    CHECK(cycles(sphere, FiniteAbelianGroup({2}), 1).order() == 8);
    CHECK(boundaries(sphere, FiniteAbelianGroup({2}), 1).order() == 8);

    const DeltaComplex torus = library_complex("torus_delta");
    for (std::int64_t nn : {2, 3, 4}) {
        const FiniteAbelianGroup G({nn});
        CHECK(factors_of(torus, G, 0, false) == V{nn});
        CHECK(factors_of(torus, G, 1, false) == V({nn, nn}));
        CHECK(factors_of(torus, G, 2, false) == V{nn});
    }

    const DeltaComplex twosph = library_complex("two_triangles_sphere");
    CHECK(factors_of(twosph, FiniteAbelianGroup({4}), 1, false) == V{});
    CHECK(factors_of(twosph, FiniteAbelianGroup({4}), 2, false) == V{4});

    const DeltaComplex k4 = library_complex("complete_graph_4");
    CHECK(factors_of(k4, FiniteAbelianGroup({2}), 1, false) == V({2, 2, 2}));

    const DeltaComplex disk = library_complex("triangle_disk");
    CHECK(factors_of(disk, FiniteAbelianGroup({2}), 1, false) == V{});
    CHECK(factors_of(disk, FiniteAbelianGroup({2}), 2, false) == V{});

    // cohomology of closed orientable complexes mirrors homology here
    CHECK(factors_of(circle, FiniteAbelianGroup({2}), 1, true) == V{2});
    CHECK(factors_of(sphere, FiniteAbelianGroup({2}), 2, true) == V{2});
    CHECK(factors_of(torus, FiniteAbelianGroup({4}), 1, true) == V({4, 4}));
}

TEST_CASE("factor_string formats invariant factors") {
    const DeltaComplex torus = library_complex("torus_delta");
    CHECK(homology(torus, FiniteAbelianGroup({4}), 1).factor_string() == "Z4xZ4");
    CHECK(homology(library_complex("sphere_tetra"), FiniteAbelianGroup({2}), 1).factor_string() ==
          "0");
}

TEST_CASE("class reduction: representatives, coset invariance, non-cycles") {
    const DeltaComplex X = library_complex("torus_delta");
    const FiniteAbelianGroup G({4});
    const HomologyStructure h = homology(X, G, 1);
    REQUIRE(h.rank() == 2);
    const auto reps = h.representative_chains();
    REQUIRE(reps.size() == 2);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        CHECK(is_zero(boundary(X, G, reps[i])));
        const auto r = h.reduce_chain(reps[i]);
        REQUIRE(r.has_value());
        for (std::size_t j = 0; j < r->size(); ++j)
            CHECK((*r)[j] == (i == j ? 1 : 0));
    }
    // shifting by a boundary cannot change the class
    const SubgroupModM B = boundaries(X, G, 1);
    const Chain z = reps[0];
    for (std::int64_t i = 0; i < B.order(); ++i) {
        const Chain shifted = add(G, z, vec_to_chain(G, 1, B.element_at(i)));
        CHECK(h.reduce_chain(shifted) == h.reduce_chain(z));
    }
}

TEST_CASE("annihilator identities in all four directions") {
    for (const char* cn : {"circle_6", "sphere_tetra", "torus_delta"}) {
        const DeltaComplex X = library_complex(cn);
        for (const auto& G : {FiniteAbelianGroup({2}), FiniteAbelianGroup({2, 4})})
            for (int n = 0; n <= X.dimension(); ++n) {
                const SubgroupModM B = boundaries(X, G, n);
                const SubgroupModM Z = cycles(X, G, n);
                const SubgroupModM Bc = coboundaries(X, G, n);
                const SubgroupModM Zc = cocycles(X, G, n);
                CHECK(annihilator(Bc) == Z);
                CHECK(annihilator(Z) == Bc);
                CHECK(annihilator(B) == Zc);
                CHECK(annihilator(Zc) == B);
            }
    }
}

// annihilator against pairing brute force on a small ambient
TEST_CASE("annihilator equals the exact pairing kernel") {
    const DeltaComplex X = library_complex("circle_3");
    const FiniteAbelianGroup G({4});
    const SubgroupModM B = boundaries(X, G, 0);
    const SubgroupModM ann = annihilator(B);
    ChainScan{X, G, 0}.run([&](const Chain& c) {
        // pair the dual coordinate vector against every member of B
        bool kills = true;
        for (std::int64_t i = 0; i < B.order() && kills; ++i) {
            const ModVec b = B.element_at(i);
            std::int64_t acc = 0;
            const ModVec v = chain_to_vec(G, c);
            for (std::size_t j = 0; j < v.size(); ++j) acc += v[j] * b[j];
            kills = acc % G.exponent() == 0;
        }
        CHECK(ann.contains(chain_to_vec(G, c)) == kills);
    });
}

TEST_CASE("cardinality identity |Z_(p+1)| |C^p| = |Z^p| |C_(p+1)|") {
    for (const char* cn : {"circle_3", "sphere_tetra", "torus_delta", "complete_graph_4"}) {
        const DeltaComplex X = library_complex(cn);
        for (const auto& G : {FiniteAbelianGroup({2}), FiniteAbelianGroup({3}),
                              FiniteAbelianGroup({2, 2})})
            for (int p = 0; p < X.dimension(); ++p) {
                auto pw = [&](int c) {
                    std::int64_t r = 1;
                    for (int i = 0; i < c; ++i) r *= G.order();
                    return r;
                };
                CHECK(cycles(X, G, p + 1).order() * pw(X.count(p)) ==
                      cocycles(X, G, p).order() * pw(X.count(p + 1)));
            }
    }
    // the tetrahedron at p = 0 over Z2: 8 / 2 = 2^(6 - 4)
    const DeltaComplex sph = library_complex("sphere_tetra");
    const FiniteAbelianGroup Z2({2});
    CHECK(cycles(sph, Z2, 1).order() == 8);
    CHECK(cocycles(sph, Z2, 0).order() == 2);
    CHECK(cycles(sph, Z2, 1).order() / cocycles(sph, Z2, 0).order() == 4);
}

TEST_CASE("boundary preimages are deterministic and reject non-boundaries") {
    const DeltaComplex X = library_complex("torus_delta");
    const FiniteAbelianGroup G({4});
    const SubgroupModM B = boundaries(X, G, 1);
    for (std::int64_t i = 0; i < B.order(); ++i) {
        const Chain k = vec_to_chain(G, 1, B.element_at(i));
        const auto a = boundary_preimage(X, G, k);
        const auto b = boundary_preimage(X, G, k);
        REQUIRE(a.has_value());
        CHECK(a->coef == b->coef);
        CHECK(chain_to_vec(G, boundary(X, G, *a)) == chain_to_vec(G, k));
    }
    // a torus 1-cycle with nontrivial class has no 2-chain preimage
    const Chain gen = homology(X, G, 1).representative_chains()[0];
    CHECK_FALSE(boundary_preimage(X, G, gen).has_value());

    const Cochain one = zero_cochain(X, G, 0);
    const auto cp = coboundary_preimage(X, G, coboundary(X, G, one));
    REQUIRE(cp.has_value());
    CHECK(is_zero(coboundary(X, G, *cp)));
}

TEST_CASE("induced inclusion maps classes through the subcomplex") {
    auto X = std::make_shared<const DeltaComplex>(library_complex("circle_6"));
    const FiniteAbelianGroup G({2});
    // an arc is contractible: its H_0 surjects onto the circle's H_0
    const Subcomplex arc = Subcomplex::build(X, {{}, {0, 1, 2}}, true);
    const HomologyStructure h_arc = homology(arc.complex(), G, 0);
    const HomologyStructure h_all = homology(*X, G, 0);
    const InducedMap f = induced_inclusion(arc, h_arc, h_all);
    CHECK(f.src_factors == std::vector<std::int64_t>{2});
    CHECK(f.dst_factors == std::vector<std::int64_t>{2});
    CHECK(f.apply({1}) == ModVec{1});
}

TEST_CASE("factorization criterion across the cut roster") {
    const auto check = [](const char* cut, bool holds, std::int64_t s, std::int64_t lo,
                          std::int64_t ro) {
        const NamedCut nc = library_cut(cut);
        const MvResult r = mv_criterion(instantiate_cut(nc), parse_group_spec(nc.group));
        CHECK(r.holds == holds);
        CHECK(r.s_order == s);
        CHECK(r.left_overlap_order == lo);
        CHECK(r.right_overlap_order == ro);
    };
    check("interval_3_half", true, 2, 1, 1);
    check("circle_3_edge", true, 2, 1, 1);
    check("circle_6_arc", true, 2, 1, 1);
    check("circle_8_two_arcs", false, 8, 2, 2);
    check("triangle_disk_all", true, 1, 1, 1);
    check("sphere_tetra_two_faces", true, 1, 1, 1);
    check("sphere_tetra_two_faces_z4", true, 1, 1, 1);
    check("sphere_tetra_one_face", true, 1, 1, 1);
    check("sphere_tetra_p0_star", true, 2, 1, 1);
    check("torus_p0_loop", true, 1, 1, 1);
    check("torus_two_faces", true, 4, 1, 1);
    check("torus_two_faces_z4", true, 16, 1, 1);
    check("two_sphere_split", true, 1, 1, 1);
    check("k4_star", true, 2, 1, 1);

    const MvResult bad =
        mv_criterion(instantiate_cut(library_cut("circle_8_two_arcs")), FiniteAbelianGroup({2}));
    CHECK(bad.h_ab_factors == std::vector<std::int64_t>({2, 2, 2, 2}));
    CHECK(bad.h_a_factors == std::vector<std::int64_t>({2, 2}));
    CHECK(bad.projections_match);
    CHECK(bad.summary().find("holds=no") != std::string::npos);
    CHECK(bad.summary().find("|S|=8") != std::string::npos);
}

}
