#pragma once

// Entanglement entropy of a pure state across a site bipartition, and exact
// diagonalization restricted to a symmetry sector given by a 0/1 diagonal
// projector.

#include <Eigen/Dense>

#include "hfent/hilbert.hpp"

namespace hfent {

struct EntropyResult {
    double value = 0.0;
    double norm = 1.0;         // input norm before any renormalization
    bool renormalized = false;  // true when the input was not normalized
};

// Von Neumann entropy (natural log) of the reduced state on the sites flagged
// in `region`. site_dims lists the local dimension of each site, site 0 most
// significant in the global index. Eigenvalues <= cutoff are dropped.
EntropyResult entanglement_entropy(const StateVector& psi,
                                   const std::vector<std::int64_t>& site_dims,
                                   const std::vector<unsigned char>& region,
                                   double cutoff = 1e-12);

// Eigenpairs of H restricted to the range of a 0/1 diagonal projector.
// States are stored compactly over the kept indices, in ascending energy
// order; degenerate clusters get a deterministic basis (Gram-Schmidt of
// standard-basis projections in index order, first significant amplitude made
// real positive) so repeated runs produce identical data.
struct SymmetricSpectrum {
    std::vector<double> energies;
    std::vector<std::int64_t> kept;  // ambient indices of the sector basis
    Eigen::MatrixXcd states;         // kept.size() x energies.size()
    std::int64_t ambient_dim = 0;

    int count() const { return static_cast<int>(energies.size()); }
    StateVector full_state(int col) const;  // embedded back into the ambient space
};

// Preconditions: H hermitian and commuting with the projector, both within
// commute_tol in Frobenius norm; violations raise a diagnostic error carrying
// the offending norm.
SymmetricSpectrum symmetric_eigenstates(const SparseOp& H, const DiagOp& sector,
                                        double commute_tol = 1e-10);
SymmetricSpectrum symmetric_eigenstates(const SparseOp& H, const HilbertModel& m,
                                        double commute_tol = 1e-10);

}  // namespace hfent
