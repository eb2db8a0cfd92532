#include "hfent/complex.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hfent {

DeltaComplex::DeltaComplex(std::string name, std::vector<int> counts,
                           std::vector<std::vector<std::vector<FaceEntry>>> boundary)
    : name_(std::move(name)), counts_(std::move(counts)), bnd_(std::move(boundary)) {
    if (counts_.empty()) throw structural_error("complex needs at least dimension 0");
    for (int c : counts_)
        if (c < 0) throw structural_error("negative simplex count");
    bnd_.resize(counts_.size());
    validate();
}

int DeltaComplex::count(int n) const {
    if (n < 0 || n > dimension()) return 0;
    return counts_[static_cast<std::size_t>(n)];
}

const std::vector<FaceEntry>& DeltaComplex::faces(int n, int i) const {
    if (n < 1 || n > dimension() || i < 0 || i >= count(n))
        throw structural_error("face query out of range");
    return bnd_[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
}

void DeltaComplex::set_labels(std::vector<std::vector<std::vector<int>>> labels) {
    labels_ = std::move(labels);
}

void DeltaComplex::validate() const {
    for (int n = 1; n <= dimension(); ++n) {
        const auto& level = bnd_[static_cast<std::size_t>(n)];
        if (static_cast<int>(level.size()) != count(n))
            throw structural_error("boundary list size mismatch in dimension " + std::to_string(n));
        for (int i = 0; i < count(n); ++i)
            for (const auto& [face, coeff] : level[static_cast<std::size_t>(i)]) {
                (void)coeff;
                if (face < 0 || face >= count(n - 1))
                    throw structural_error("face index out of range for simplex " + std::to_string(i) +
                                           " in dimension " + std::to_string(n));
            }
    }
    // Boundary of boundary must vanish over the integers.
    for (int n = 2; n <= dimension(); ++n)
        for (int i = 0; i < count(n); ++i) {
            std::map<int, std::int64_t> acc;
            for (const auto& [face, coeff] : faces(n, i))
                for (const auto& [face2, coeff2] : faces(n - 1, face)) acc[face2] += coeff * coeff2;
            for (const auto& [face2, total] : acc)
                if (total != 0)
                    throw structural_error("boundary of boundary nonzero at simplex " + std::to_string(i) +
                                           " in dimension " + std::to_string(n) + " (face " +
                                           std::to_string(face2) + ")");
        }
}

DeltaComplex complex_from_simplices(const std::string& name,
                                    const std::vector<std::vector<std::vector<int>>>& simplices) {
    if (simplices.empty()) throw structural_error("no simplices given");
    std::vector<int> counts;
    for (const auto& level : simplices) counts.push_back(static_cast<int>(level.size()));

    // Tuple -> index per dimension; duplicates would make face lookups ambiguous.
    std::vector<std::map<std::vector<int>, int>> index(simplices.size());
    for (std::size_t n = 0; n < simplices.size(); ++n)
        for (std::size_t i = 0; i < simplices[n].size(); ++i) {
            const auto& tuple = simplices[n][i];
            if (tuple.size() != n + 1)
                throw structural_error("simplex tuple of wrong length in dimension " + std::to_string(n));
            if (!index[n].emplace(tuple, static_cast<int>(i)).second)
                throw structural_error("duplicate vertex tuple in dimension " + std::to_string(n));
        }

    std::vector<std::vector<std::vector<FaceEntry>>> bnd(simplices.size());
    for (std::size_t n = 1; n < simplices.size(); ++n) {
        bnd[n].resize(simplices[n].size());
        for (std::size_t i = 0; i < simplices[n].size(); ++i) {
            const auto& tuple = simplices[n][i];
            std::map<int, std::int64_t> acc;
            for (std::size_t drop = 0; drop < tuple.size(); ++drop) {
                std::vector<int> face_tuple;
                for (std::size_t t = 0; t < tuple.size(); ++t)
                    if (t != drop) face_tuple.push_back(tuple[t]);
                auto it = index[n - 1].find(face_tuple);
                if (it == index[n - 1].end())
                    throw structural_error("missing face of simplex " + std::to_string(i) + " in dimension " +
                                           std::to_string(n));
                acc[it->second] += (drop % 2 == 0) ? 1 : -1;
            }
            for (const auto& [face, coeff] : acc)
                if (coeff != 0) bnd[n][i].push_back({face, coeff});
        }
    }
    DeltaComplex X(name, counts, std::move(bnd));
    std::vector<std::vector<std::vector<int>>> labels(simplices.begin(), simplices.end());
    X.set_labels(std::move(labels));
    return X;
}

namespace {

DeltaComplex make_interval(int n) {
    // Vertices 0..n, edge i = [v_i, v_{i+1}].
    std::vector<std::vector<std::vector<FaceEntry>>> bnd(2);
    bnd[1].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bnd[1][static_cast<std::size_t>(i)] = {{i + 1, 1}, {i, -1}};
    return DeltaComplex("interval_" + std::to_string(n), {n + 1, n}, std::move(bnd));
}

DeltaComplex make_circle(int n) {
    // Vertices 0..n-1, edge i runs v_i -> v_{i+1 mod n}. For n = 1 the edge is
    // a loop with zero boundary; raw incidence keeps that well-formed.
    std::vector<std::vector<std::vector<FaceEntry>>> bnd(2);
    bnd[1].resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int head = (i + 1) % n;
        if (head == i)
            bnd[1][static_cast<std::size_t>(i)] = {};
        else
            bnd[1][static_cast<std::size_t>(i)] = {{head, 1}, {i, -1}};
    }
    return DeltaComplex("circle_" + std::to_string(n), {n, n}, std::move(bnd));
}

DeltaComplex make_complete_graph(int n) {
    std::vector<std::vector<std::vector<int>>> simplices(2);
    for (int v = 0; v < n; ++v) simplices[0].push_back({v});
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) simplices[1].push_back({a, b});
    return complex_from_simplices("complete_graph_" + std::to_string(n), simplices);
}

DeltaComplex make_triangle_disk() {
    return complex_from_simplices("triangle_disk",
                                  {{{0}, {1}, {2}}, {{0, 1}, {0, 2}, {1, 2}}, {{0, 1, 2}}});
}

DeltaComplex make_sphere_tetra() {
    return complex_from_simplices(
        "sphere_tetra", {{{0}, {1}, {2}, {3}},
                         {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}},
                         {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}});
}

DeltaComplex make_two_triangles_sphere() {
    // Two 2-simplices glued along the same three edges; identical vertex
    // tuples force raw incidence. Edges: [0,1],[0,2],[1,2].
    std::vector<std::vector<std::vector<FaceEntry>>> bnd(3);
    bnd[1] = {{{1, 1}, {0, -1}}, {{2, 1}, {0, -1}}, {{2, 1}, {1, -1}}};
    bnd[2] = {{{2, 1}, {1, -1}, {0, 1}}, {{2, 1}, {1, -1}, {0, 1}}};
    DeltaComplex X("two_triangles_sphere", {3, 3, 2}, std::move(bnd));
    return X;
}

DeltaComplex make_torus_delta() {
    // One vertex, loops a,b,c, two faces with boundary a + b - c each.
    std::vector<std::vector<std::vector<FaceEntry>>> bnd(3);
    bnd[1] = {{}, {}, {}};
    bnd[2] = {{{0, 1}, {1, 1}, {2, -1}}, {{0, 1}, {1, 1}, {2, -1}}};
    return DeltaComplex("torus_delta", {1, 3, 2}, std::move(bnd));
}

std::optional<int> parse_suffix(const std::string& name, const std::string& prefix) {
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    const std::string digits = name.substr(prefix.size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    return std::stoi(digits);
}

}  // namespace

DeltaComplex library_complex(const std::string& name) {
    if (auto n = parse_suffix(name, "interval_")) {
        if (*n < 1) throw structural_error("interval_n needs n >= 1");
        return make_interval(*n);
    }
    if (auto n = parse_suffix(name, "circle_")) {
        if (*n < 1) throw structural_error("circle_n needs n >= 1");
        return make_circle(*n);
    }
    if (auto n = parse_suffix(name, "complete_graph_")) {
        if (*n < 2) throw structural_error("complete_graph_n needs n >= 2");
        return make_complete_graph(*n);
    }
    if (name == "triangle_disk") return make_triangle_disk();
    if (name == "sphere_tetra") return make_sphere_tetra();
    if (name == "two_triangles_sphere") return make_two_triangles_sphere();
    if (name == "torus_delta") return make_torus_delta();
    throw structural_error("unknown library complex '" + name + "'");
}

std::vector<std::string> library_roster() {
    return {"interval_3",  "circle_3",     "circle_6",
            "circle_8",    "triangle_disk", "sphere_tetra",
            "two_triangles_sphere", "torus_delta", "complete_graph_4"};
}

Chain zero_chain(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    Chain c;
    c.dim = n;
    if (n >= 0) c.coef.assign(static_cast<std::size_t>(X.count(n)), G.zero_char());
    return c;
}

Cochain zero_cochain(const DeltaComplex& X, const FiniteAbelianGroup& G, int n) {
    Cochain f;
    f.dim = n;
    if (n >= 0) f.val.assign(static_cast<std::size_t>(X.count(n)), G.identity());
    return f;
}

bool is_zero(const Chain& c) {
    for (const auto& x : c.coef)
        for (auto r : x.res)
            if (r != 0) return false;
    return true;
}

bool is_zero(const Cochain& f) {
    for (const auto& x : f.val)
        for (auto r : x.res)
            if (r != 0) return false;
    return true;
}

namespace {

void check_same_dim(int a, int b, const char* what) {
    if (a != b) throw structural_error(std::string(what) + ": dimension mismatch");
}

}  // namespace

Chain add(const FiniteAbelianGroup& G, const Chain& a, const Chain& b) {
    check_same_dim(a.dim, b.dim, "chain add");
    if (a.coef.size() != b.coef.size()) throw structural_error("chain add: size mismatch");
    Chain out = a;
    for (std::size_t i = 0; i < a.coef.size(); ++i) out.coef[i] = G.add(a.coef[i], b.coef[i]);
    return out;
}

Chain sub(const FiniteAbelianGroup& G, const Chain& a, const Chain& b) { return add(G, a, neg(G, b)); }

Chain neg(const FiniteAbelianGroup& G, const Chain& a) {
    Chain out = a;
    for (auto& c : out.coef) c = G.neg(c);
    return out;
}

Cochain add(const FiniteAbelianGroup& G, const Cochain& a, const Cochain& b) {
    check_same_dim(a.dim, b.dim, "cochain add");
    if (a.val.size() != b.val.size()) throw structural_error("cochain add: size mismatch");
    Cochain out = a;
    for (std::size_t i = 0; i < a.val.size(); ++i) out.val[i] = G.add(a.val[i], b.val[i]);
    return out;
}

Cochain sub(const FiniteAbelianGroup& G, const Cochain& a, const Cochain& b) { return add(G, a, neg(G, b)); }

Cochain neg(const FiniteAbelianGroup& G, const Cochain& a) {
    Cochain out = a;
    for (auto& v : out.val) v = G.neg(v);
    return out;
}

Chain boundary(const DeltaComplex& X, const FiniteAbelianGroup& G, const Chain& c) {
    if (c.dim < 0 || c.dim > X.dimension()) throw structural_error("boundary: bad chain dimension");
    if (static_cast<int>(c.coef.size()) != X.count(c.dim)) throw structural_error("boundary: size mismatch");
    Chain out = zero_chain(X, G, c.dim - 1);
    if (c.dim == 0) return out;  // the zero chain in dimension -1
    for (int i = 0; i < X.count(c.dim); ++i)
        for (const auto& [face, coeff] : X.faces(c.dim, i)) {
            auto& slot = out.coef[static_cast<std::size_t>(face)];
            slot = G.add(slot, G.scale(c.coef[static_cast<std::size_t>(i)], coeff));
        }
    return out;
}

Cochain coboundary(const DeltaComplex& X, const FiniteAbelianGroup& G, const Cochain& f) {
    if (f.dim < 0 || f.dim > X.dimension()) throw structural_error("coboundary: bad cochain dimension");
    if (static_cast<int>(f.val.size()) != X.count(f.dim)) throw structural_error("coboundary: size mismatch");
    Cochain out = zero_cochain(X, G, f.dim + 1);
    if (f.dim == X.dimension()) {
        out.val.clear();  // no simplices one dimension up
        return out;
    }
    for (int i = 0; i < X.count(f.dim + 1); ++i) {
        GroupElement acc = G.identity();
        for (const auto& [face, coeff] : X.faces(f.dim + 1, i))
            acc = G.add(acc, G.scale(f.val[static_cast<std::size_t>(face)], coeff));
        out.val[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

Angle pairing(const FiniteAbelianGroup& G, const Chain& k, const Cochain& phi) {
    check_same_dim(k.dim, phi.dim, "pairing");
    if (k.coef.size() != phi.val.size()) throw structural_error("pairing: size mismatch");
    Angle acc;
    for (std::size_t i = 0; i < k.coef.size(); ++i) acc = acc + G.eval(k.coef[i], phi.val[i]);
    return acc;
}

Subcomplex Subcomplex::build(std::shared_ptr<const DeltaComplex> parent,
                             std::vector<std::vector<int>> simplices, bool complete_downward) {
    const int D = parent->dimension();
    simplices.resize(static_cast<std::size_t>(D) + 1);
    std::vector<std::set<int>> sets(static_cast<std::size_t>(D) + 1);
    for (int n = 0; n <= D; ++n)
        for (int i : simplices[static_cast<std::size_t>(n)]) {
            if (i < 0 || i >= parent->count(n))
                throw structural_error("subcomplex index out of range in dimension " + std::to_string(n));
            sets[static_cast<std::size_t>(n)].insert(i);
        }
    for (int n = D; n >= 1; --n)
        for (int i : sets[static_cast<std::size_t>(n)])
            for (const auto& [face, coeff] : parent->faces(n, i)) {
                (void)coeff;
                if (complete_downward)
                    sets[static_cast<std::size_t>(n - 1)].insert(face);
                else if (!sets[static_cast<std::size_t>(n - 1)].contains(face))
                    throw structural_error("subcomplex not closed: missing face " + std::to_string(face) +
                                           " in dimension " + std::to_string(n - 1));
            }

    Subcomplex S;
    S.parent_ = parent;
    S.simplices_.resize(static_cast<std::size_t>(D) + 1);
    S.local_.resize(static_cast<std::size_t>(D) + 1);
    std::vector<int> counts(static_cast<std::size_t>(D) + 1, 0);
    for (int n = 0; n <= D; ++n) {
        auto& list = S.simplices_[static_cast<std::size_t>(n)];
        list.assign(sets[static_cast<std::size_t>(n)].begin(), sets[static_cast<std::size_t>(n)].end());
        for (std::size_t j = 0; j < list.size(); ++j)
            S.local_[static_cast<std::size_t>(n)][list[j]] = static_cast<int>(j);
        counts[static_cast<std::size_t>(n)] = static_cast<int>(list.size());
    }
    std::vector<std::vector<std::vector<FaceEntry>>> bnd(static_cast<std::size_t>(D) + 1);
    for (int n = 1; n <= D; ++n) {
        bnd[static_cast<std::size_t>(n)].resize(S.simplices_[static_cast<std::size_t>(n)].size());
        for (std::size_t j = 0; j < S.simplices_[static_cast<std::size_t>(n)].size(); ++j)
            for (const auto& [face, coeff] : parent->faces(n, S.simplices_[static_cast<std::size_t>(n)][j]))
                bnd[static_cast<std::size_t>(n)][j].push_back(
                    {S.local_[static_cast<std::size_t>(n - 1)].at(face), coeff});
    }
    S.cx_ = std::make_shared<DeltaComplex>(parent->name() + "|sub", counts, std::move(bnd));
    return S;
}

const std::vector<int>& Subcomplex::simplices(int n) const {
    if (n < 0 || n >= static_cast<int>(simplices_.size())) {
        static const std::vector<int> none;
        return none;
    }
    return simplices_[static_cast<std::size_t>(n)];
}

bool Subcomplex::contains(int n, int parent_index) const {
    if (n < 0 || n >= static_cast<int>(local_.size())) return false;
    return local_[static_cast<std::size_t>(n)].contains(parent_index);
}

int Subcomplex::to_local(int n, int parent_index) const {
    if (!contains(n, parent_index))
        throw structural_error("simplex " + std::to_string(parent_index) + " not in subcomplex");
    return local_[static_cast<std::size_t>(n)].at(parent_index);
}

int Subcomplex::to_parent(int n, int local_index) const {
    const auto& list = simplices(n);
    if (local_index < 0 || local_index >= static_cast<int>(list.size()))
        throw structural_error("local index out of range");
    return list[static_cast<std::size_t>(local_index)];
}

Chain Subcomplex::push_chain(const FiniteAbelianGroup& G, const Chain& local) const {
    Chain out = zero_chain(*parent_, G, local.dim);
    if (local.dim < 0) return out;
    const auto& list = simplices(local.dim);
    if (local.coef.size() != list.size()) throw structural_error("push_chain: size mismatch");
    for (std::size_t j = 0; j < list.size(); ++j) out.coef[static_cast<std::size_t>(list[j])] = local.coef[j];
    return out;
}

Chain Subcomplex::restrict_chain(const FiniteAbelianGroup& G, const Chain& global) const {
    Chain out = zero_chain(*cx_, G, global.dim);
    if (global.dim < 0) return out;
    if (static_cast<int>(global.coef.size()) != parent_->count(global.dim))
        throw structural_error("restrict_chain: size mismatch");
    for (int i = 0; i < parent_->count(global.dim); ++i) {
        const auto& c = global.coef[static_cast<std::size_t>(i)];
        bool zero = true;
        for (auto r : c.res) zero = zero && r == 0;
        if (zero) continue;
        if (!contains(global.dim, i))
            throw structural_error("restrict_chain: support outside subcomplex at simplex " + std::to_string(i));
        out.coef[static_cast<std::size_t>(to_local(global.dim, i))] = c;
    }
    return out;
}

Bipartition make_bipartition(std::shared_ptr<const DeltaComplex> X, int p,
                             std::vector<int> A_faces, std::vector<int> A_psimplices) {
    const int D = X->dimension();
    if (p < 0 || p + 1 > D) throw structural_error("bipartition needs 0 <= p and p+1 <= dimension");
    std::set<int> faceset(A_faces.begin(), A_faces.end());
    std::set<int> pset(A_psimplices.begin(), A_psimplices.end());
    for (int f : faceset)
        if (f < 0 || f >= X->count(p + 1)) throw structural_error("A face index out of range");
    for (int s : pset)
        if (s < 0 || s >= X->count(p)) throw structural_error("A p-simplex index out of range");
    // The p-faces of A's (p+1)-simplices must be declared in A_psimplices.
    for (int f : faceset)
        for (const auto& [face, coeff] : X->faces(p + 1, f)) {
            (void)coeff;
            if (!pset.contains(face))
                throw structural_error("A not closed: p-face " + std::to_string(face) + " of face " +
                                       std::to_string(f) + " missing from A_psimplices");
        }

    Bipartition bp;
    bp.p = p;
    bp.X = X;
    bp.A_faces.assign(faceset.begin(), faceset.end());
    bp.A_psimplices.assign(pset.begin(), pset.end());

    std::set<int> bfaces;
    for (int f = 0; f < X->count(p + 1); ++f)
        if (!faceset.contains(f)) bfaces.insert(f);
    std::set<int> bpsimp;
    for (int s = 0; s < X->count(p); ++s)
        if (!pset.contains(s)) {
            bpsimp.insert(s);
            bp.Ac_psimplices.push_back(s);
        }
    for (int f : bfaces)
        for (const auto& [face, coeff] : X->faces(p + 1, f)) {
            (void)coeff;
            bpsimp.insert(face);
        }
    bp.B_faces.assign(bfaces.begin(), bfaces.end());
    bp.B_psimplices.assign(bpsimp.begin(), bpsimp.end());

    // Every p-simplex must land in A or B; true by construction, kept as a guard.
    for (int s = 0; s < X->count(p); ++s)
        if (!pset.contains(s) && !bpsimp.contains(s))
            throw structural_error("p-simplex " + std::to_string(s) + " in neither region");

    std::vector<std::vector<int>> asimp(static_cast<std::size_t>(D) + 1);
    asimp[static_cast<std::size_t>(p + 1)] = bp.A_faces;
    asimp[static_cast<std::size_t>(p)] = bp.A_psimplices;
    bp.A = Subcomplex::build(X, asimp, true);

    std::vector<std::vector<int>> bsimp(static_cast<std::size_t>(D) + 1);
    bsimp[static_cast<std::size_t>(p + 1)] = bp.B_faces;
    bsimp[static_cast<std::size_t>(p)] = bp.B_psimplices;
    bp.B = Subcomplex::build(X, bsimp, true);

    std::vector<std::vector<int>> cap(static_cast<std::size_t>(D) + 1);
    for (int n = 0; n <= p; ++n) {
        std::set_intersection(bp.A.simplices(n).begin(), bp.A.simplices(n).end(),
                              bp.B.simplices(n).begin(), bp.B.simplices(n).end(),
                              std::back_inserter(cap[static_cast<std::size_t>(n)]));
    }
    for (int n : cap[static_cast<std::size_t>(p)]) bp.boundary_psimplices.push_back(n);
    bp.AB = Subcomplex::build(X, cap, false);  // intersection of closed sets is closed
    return bp;
}

const std::vector<NamedCut>& library_cut_roster() {
    // Indices follow the library builders: interval/circle edges run along the
    // path, simplex-built complexes enumerate tuples lexicographically.
    static const std::vector<NamedCut> roster = {
        {"interval_3_half", "interval_3", 0, {0}, {0, 1}, "Z2"},
        {"circle_3_edge", "circle_3", 0, {0}, {0, 1}, "Z2"},
        {"circle_6_arc", "circle_6", 0, {0, 1, 2}, {0, 1, 2, 3}, "Z2"},
        {"circle_8_two_arcs", "circle_8", 0, {0, 1, 4, 5}, {0, 1, 2, 4, 5, 6}, "Z2"},
        {"triangle_disk_all", "triangle_disk", 1, {0}, {0, 1, 2}, "Z2"},
        {"sphere_tetra_two_faces", "sphere_tetra", 1, {0, 1}, {0, 1, 2, 3, 4}, "Z2"},
        {"sphere_tetra_one_face", "sphere_tetra", 1, {0}, {0, 1, 3}, "Z2"},
        {"sphere_tetra_p0_star", "sphere_tetra", 0, {0, 1, 2}, {0, 1, 2, 3}, "Z2"},
        {"torus_p0_loop", "torus_delta", 0, {0}, {0}, "Z2"},
        {"torus_two_faces", "torus_delta", 1, {0}, {0, 1, 2}, "Z2"},
        {"torus_two_faces_z4", "torus_delta", 1, {0}, {0, 1, 2}, "Z4"},
        {"two_sphere_split", "two_triangles_sphere", 1, {0}, {0, 1, 2}, "Z2"},
        {"k4_star", "complete_graph_4", 0, {0, 1, 2}, {0, 1, 2, 3}, "Z2"},
        {"sphere_tetra_two_faces_z4", "sphere_tetra", 1, {0, 1}, {0, 1, 2, 3, 4}, "Z4"},
    };
    return roster;
}

NamedCut library_cut(const std::string& name) {
    for (const auto& c : library_cut_roster())
        if (c.name == name) return c;
    throw domain_error("unknown library cut '" + name + "'");
}

Bipartition instantiate_cut(const NamedCut& cut) {
    auto X = std::make_shared<DeltaComplex>(library_complex(cut.complex_name));
    return make_bipartition(X, cut.p, cut.A_faces, cut.A_psimplices);
}

}  // namespace hfent
