#pragma once

// Tensor-product Hilbert space of a p-form matter / (p+1)-form gauge model on
// a Delta-complex. One site per p-simplex carrying character labels and one
// per (p+1)-simplex carrying group labels; the global basis index is
// p_index * p1_dim + p1_index with site 0 most significant on each side.

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hfent/complex.hpp"
#include "hfent/group.hpp"
#include "hfent/zmod.hpp"

namespace hfent {

using StateVector = Eigen::VectorXcd;
using SparseOp = Eigen::SparseMatrix<std::complex<double>>;

// Default Hilbert dimension guard; HFENT_DIM_CAP in the environment overrides.
std::int64_t default_dim_cap();

struct SiteSpecP {
    int simplex = 0;
    std::vector<Character> basis;
};

struct SiteSpecP1 {
    int simplex = 0;
    std::vector<GroupElement> basis;
    bool regular = false;  // basis is every group element once, in enumeration order
};

class HilbertModel {
public:
    // Every character once per p-site, regular group basis per (p+1)-site.
    static HilbertModel regular(std::shared_ptr<const DeltaComplex> X, FiniteAbelianGroup G,
                                int p, std::int64_t dim_cap = default_dim_cap());
    // Explicit per-site label lists (multiplicities allowed, empty forbidden).
    static HilbertModel custom(std::shared_ptr<const DeltaComplex> X, FiniteAbelianGroup G, int p,
                               std::vector<std::vector<Character>> p_bases,
                               std::vector<std::vector<GroupElement>> p1_bases,
                               std::int64_t dim_cap = default_dim_cap());

    const DeltaComplex& complex() const { return *X_; }
    std::shared_ptr<const DeltaComplex> complex_ptr() const { return X_; }
    const FiniteAbelianGroup& group() const { return G_; }
    int p() const { return p_; }

    int n_p_sites() const { return static_cast<int>(p_sites_.size()); }
    int n_p1_sites() const { return static_cast<int>(p1_sites_.size()); }
    const SiteSpecP& p_site(int i) const { return p_sites_[static_cast<std::size_t>(i)]; }
    const SiteSpecP1& p1_site(int i) const { return p1_sites_[static_cast<std::size_t>(i)]; }
    bool all_regular() const;

    std::int64_t dim() const { return dim_; }
    std::int64_t p_dim() const { return p_dim_; }
    std::int64_t p1_dim() const { return p1_dim_; }

    std::int64_t p_index(std::int64_t global) const { return global / p1_dim_; }
    std::int64_t p1_index(std::int64_t global) const { return global % p1_dim_; }
    std::int64_t global_index(std::int64_t pi, std::int64_t p1i) const { return pi * p1_dim_ + p1i; }

    void p_labels(std::int64_t p_index, std::vector<int>& out) const;
    void p1_labels(std::int64_t p1_index, std::vector<int>& out) const;
    std::int64_t p_index_of(const std::vector<int>& labels) const;
    std::int64_t p1_index_of(const std::vector<int>& labels) const;

    // Charge configuration of a p-basis state as a chain over the p-simplices,
    // and gauge configuration of a (p+1)-basis state as a cochain.
    Chain char_chain(std::int64_t p_index) const;
    Cochain group_cochain(std::int64_t p1_index) const;
    ModVec char_vec(std::int64_t p_index) const;
    ModVec group_vec(std::int64_t p1_index) const;

    // Site dimensions in global basis order: p-sites then (p+1)-sites.
    std::vector<std::int64_t> site_dims() const;

private:
    HilbertModel() = default;
    void finalize(std::int64_t dim_cap);

    std::shared_ptr<const DeltaComplex> X_;
    FiniteAbelianGroup G_{std::vector<std::int64_t>{}};
    int p_ = 0;
    std::vector<SiteSpecP> p_sites_;
    std::vector<SiteSpecP1> p1_sites_;
    std::vector<std::int64_t> p_strides_, p1_strides_;
    std::int64_t p_dim_ = 1, p1_dim_ = 1, dim_ = 1;
};

// Diagonal operator with exact rational phases: entry i is 0 when !keep[i]
// and exp(2*pi*i*ph[i]) otherwise. Products and equality are exact.
struct DiagOp {
    std::vector<unsigned char> keep;
    std::vector<Angle> ph;

    static DiagOp identity(std::int64_t n);
    std::int64_t size() const { return static_cast<std::int64_t>(keep.size()); }
    DiagOp operator*(const DiagOp& o) const;
    DiagOp adjoint() const;
    bool operator==(const DiagOp& o) const;

    std::complex<double> amplitude(std::int64_t i) const;
    Eigen::VectorXcd amplitudes() const;
    void apply_in_place(StateVector& v) const;
    SparseOp to_sparse() const;
    // sup-norm of the difference, which for diagonals is the operator norm.
    double norm_diff(const DiagOp& o) const;
};

// Phased permutation: |i> -> exp(2*pi*i*ph[i]) |dst[i]>. dst must be a
// bijection, so these stay exactly unitary under composition.
struct PermOp {
    std::vector<std::int64_t> dst;
    std::vector<Angle> ph;

    static PermOp identity(std::int64_t n);
    std::int64_t size() const { return static_cast<std::int64_t>(dst.size()); }
    PermOp operator*(const PermOp& o) const;  // this applied after o
    PermOp adjoint() const;
    bool operator==(const PermOp& o) const;

    StateVector apply(const StateVector& v) const;
    SparseOp to_sparse() const;
};

// Mixed products keeping exact form: diagonal after/before a permutation.
PermOp compose(const DiagOp& d, const PermOp& t);  // d * t
PermOp compose(const PermOp& t, const DiagOp& d);  // t * d

double frob_norm(const SparseOp& a);
double op_norm_diff(const SparseOp& a, const SparseOp& b);
SparseOp kron(const SparseOp& a, const SparseOp& b);
SparseOp sparse_identity(std::int64_t n);
// O on the p-register (resp. (p+1)-register) lifted to the full space.
SparseOp lift_p(const HilbertModel& m, const SparseOp& op);
SparseOp lift_p1(const HilbertModel& m, const SparseOp& op);

}  // namespace hfent
