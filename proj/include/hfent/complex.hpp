#pragma once

// Delta-complexes with raw integer incidence, chains/cochains over a finite
// abelian group, boundary/coboundary/pairing, the named library complexes,
// and bipartitions into closed subcomplexes A / B with boundary A-cap-B.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hfent/group.hpp"

namespace hfent {

struct FaceEntry {
    int face = 0;            // index in dimension n-1
    std::int64_t coeff = 0;  // integer incidence coefficient
    bool operator==(const FaceEntry&) const = default;
};

// Stored as raw incidence so identified-face complexes (torus_delta, spheres
// made of two triangles, ...) are first-class. Vertex labels are optional.
class DeltaComplex {
public:
    DeltaComplex(std::string name, std::vector<int> counts,
                 std::vector<std::vector<std::vector<FaceEntry>>> boundary);

    const std::string& name() const { return name_; }
    int dimension() const { return static_cast<int>(counts_.size()) - 1; }
    int count(int n) const;  // 0 outside [0, dimension]
    // Incidence list of simplex i in dimension n >= 1.
    const std::vector<FaceEntry>& faces(int n, int i) const;

    const std::vector<std::vector<std::vector<int>>>& labels() const { return labels_; }
    void set_labels(std::vector<std::vector<std::vector<int>>> labels);

private:
    void validate() const;  // indices in range, boundary-of-boundary = 0 over Z

    std::string name_;
    std::vector<int> counts_;
    std::vector<std::vector<std::vector<FaceEntry>>> bnd_;  // bnd_[n][i], n >= 1
    std::vector<std::vector<std::vector<int>>> labels_;
};

// Builds incidence from vertex tuples: face i of [v0..vn] drops vertex i and
// carries sign (-1)^i. Every face tuple must appear in dimension n-1.
DeltaComplex complex_from_simplices(const std::string& name,
                                    const std::vector<std::vector<std::vector<int>>>& simplices);

// Named library: interval_n, circle_n, triangle_disk, sphere_tetra,
// two_triangles_sphere, torus_delta, complete_graph_n.
DeltaComplex library_complex(const std::string& name);
// The fixed instance list used wherever "every library complex" is quantified.
std::vector<std::string> library_roster();

// Chain with coefficients in the dual group (characters); the natural home of
// symmetry charges. dim -1 with no entries is the zero chain of a 0-chain's
// boundary.
struct Chain {
    int dim = -1;
    std::vector<Character> coef;
};

// Cochain valued in the group itself (gauge configurations).
struct Cochain {
    int dim = 0;
    std::vector<GroupElement> val;
};

Chain zero_chain(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);
Cochain zero_cochain(const DeltaComplex& X, const FiniteAbelianGroup& G, int n);
bool is_zero(const Chain& c);
bool is_zero(const Cochain& f);
Chain add(const FiniteAbelianGroup& G, const Chain& a, const Chain& b);
Chain sub(const FiniteAbelianGroup& G, const Chain& a, const Chain& b);
Chain neg(const FiniteAbelianGroup& G, const Chain& a);
Cochain add(const FiniteAbelianGroup& G, const Cochain& a, const Cochain& b);
Cochain sub(const FiniteAbelianGroup& G, const Cochain& a, const Cochain& b);
Cochain neg(const FiniteAbelianGroup& G, const Cochain& a);

// del_n : C_n -> C_{n-1}; del_0 is the zero map onto the empty chain.
Chain boundary(const DeltaComplex& X, const FiniteAbelianGroup& G, const Chain& c);
// delta_n : C^n -> C^{n+1}; at the top dimension the result is empty.
Cochain coboundary(const DeltaComplex& X, const FiniteAbelianGroup& G, const Cochain& f);

// <k, phi> = sum_sigma k_sigma(phi(sigma)), exact.
Angle pairing(const FiniteAbelianGroup& G, const Chain& k, const Cochain& phi);

// Closed subcomplex of a parent complex, re-indexed into its own DeltaComplex.
// simplices[n] holds the sorted parent indices present in dimension n.
class Subcomplex {
public:
    Subcomplex() = default;
    // 'complete_downward': add all faces below min_complete_dim automatically.
    static Subcomplex build(std::shared_ptr<const DeltaComplex> parent,
                            std::vector<std::vector<int>> simplices, bool complete_downward);

    const DeltaComplex& complex() const { return *cx_; }
    std::shared_ptr<const DeltaComplex> complex_ptr() const { return cx_; }
    const DeltaComplex& parent() const { return *parent_; }
    const std::vector<int>& simplices(int n) const;
    bool contains(int n, int parent_index) const;
    int to_local(int n, int parent_index) const;   // throws if absent
    int to_parent(int n, int local_index) const;

    // Chains move between local and parent coordinates by re-indexing.
    Chain push_chain(const FiniteAbelianGroup& G, const Chain& local) const;
    Chain restrict_chain(const FiniteAbelianGroup& G, const Chain& global) const;  // support must lie inside

private:
    std::shared_ptr<const DeltaComplex> parent_;
    std::shared_ptr<const DeltaComplex> cx_;
    std::vector<std::vector<int>> simplices_;
    std::vector<std::unordered_map<int, int>> local_;
    std::vector<std::vector<int>> empty_;
};

// Region A is the downward closure of the given (p+1)-simplices (A_faces)
// plus the given p-simplices; B is derived so that A union B covers X up to
// dimension p+1 and A cap B is the dimension-<=p boundary.
struct Bipartition {
    int p = 0;
    std::shared_ptr<const DeltaComplex> X;
    Subcomplex A, B, AB;
    std::vector<int> A_faces, B_faces;            // (p+1)-simplices
    std::vector<int> A_psimplices, B_psimplices;  // p-simplices of each region
    std::vector<int> Ac_psimplices;               // complement of A_psimplices in X
    std::vector<int> boundary_psimplices;         // A_psimplices cap B_psimplices
};

Bipartition make_bipartition(std::shared_ptr<const DeltaComplex> X, int p,
                             std::vector<int> A_faces, std::vector<int> A_psimplices);

// A named bipartition of a library complex together with the coefficient
// group it is normally run with. The fixed instance list used wherever
// "every library cut" is quantified.
struct NamedCut {
    std::string name;
    std::string complex_name;
    int p = 0;
    std::vector<int> A_faces;
    std::vector<int> A_psimplices;
    std::string group;
};

const std::vector<NamedCut>& library_cut_roster();
NamedCut library_cut(const std::string& name);
Bipartition instantiate_cut(const NamedCut& cut);

}  // namespace hfent
