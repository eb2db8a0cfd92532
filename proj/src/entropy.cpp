#include "hfent/entropy.hpp"

#include <cmath>
#include <cstdio>

#include "hfent/operators.hpp"

namespace hfent {

EntropyResult entanglement_entropy(const StateVector& psi,
                                   const std::vector<std::int64_t>& site_dims,
                                   const std::vector<unsigned char>& region, double cutoff) {
    if (region.size() != site_dims.size())
        throw domain_error("entanglement_entropy: region flags must match the site list");
    std::int64_t total = 1, dim_a = 1, dim_b = 1;
    for (std::size_t i = 0; i < site_dims.size(); ++i) {
        if (site_dims[i] < 1) throw domain_error("entanglement_entropy: invalid site dimension");
        total *= site_dims[i];
        (region[i] ? dim_a : dim_b) *= site_dims[i];
    }
    if (psi.size() != total)
        throw domain_error("entanglement_entropy: state length does not match the site dims");

    EntropyResult res;
    StateVector state = psi;
    res.norm = state.norm();
    if (res.norm == 0.0) throw domain_error("entanglement_entropy: zero state");
    if (std::abs(res.norm - 1.0) > 1e-12) {
        state /= res.norm;
        res.renormalized = true;
    }

    // Row/column index of each global basis vector under the region split;
    // digits run site 0 most significant, matching the model index layout.
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim_a, dim_b);
    std::vector<std::int64_t> stride_a(site_dims.size(), 0), stride_b(site_dims.size(), 0);
    {
        std::int64_t sa = dim_a, sb = dim_b;
        for (std::size_t i = 0; i < site_dims.size(); ++i) {
            if (region[i]) {
                sa /= site_dims[i];
                stride_a[i] = sa;
            } else {
                sb /= site_dims[i];
                stride_b[i] = sb;
            }
        }
    }
    for (std::int64_t g = 0; g < total; ++g) {
        std::int64_t rest = g, a = 0, b = 0;
        for (std::size_t i = site_dims.size(); i-- > 0;) {
            const std::int64_t digit = rest % site_dims[i];
            rest /= site_dims[i];
            if (region[i])
                a += digit * stride_a[i];
            else
                b += digit * stride_b[i];
        }
        M(a, b) = state[g];
    }

    // Spectrum of the reduced state from the Gram matrix on the smaller side.
    Eigen::MatrixXcd gram;
    if (dim_a <= dim_b)
        gram = M * M.adjoint();
    else
        gram = M.adjoint() * M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (lam > cutoff) s -= lam * std::log(lam);
    }
    res.value = s < 0.0 ? 0.0 : s;
    return res;
}

StateVector SymmetricSpectrum::full_state(int col) const {
    StateVector v = StateVector::Zero(ambient_dim);
    for (std::size_t i = 0; i < kept.size(); ++i)
        v[kept[i]] = states(static_cast<Eigen::Index>(i), col);
    return v;
}

SymmetricSpectrum symmetric_eigenstates(const SparseOp& H, const DiagOp& sector,
                                        double commute_tol) {
    if (H.rows() != H.cols() || H.rows() != sector.size())
        throw domain_error("symmetric_eigenstates: operator and sector size mismatch");
    for (std::size_t i = 0; i < sector.keep.size(); ++i)
        if (sector.keep[i] && !sector.ph[i].is_zero())
            throw domain_error("symmetric_eigenstates: the sector must be a 0/1 projector");

    std::vector<std::int64_t> kept;
    std::vector<std::int64_t> pos(static_cast<std::size_t>(H.rows()), -1);
    for (std::int64_t i = 0; i < sector.size(); ++i)
        if (sector.keep[static_cast<std::size_t>(i)]) {
            pos[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(kept.size());
            kept.push_back(i);
        }
    const std::int64_t nk = static_cast<std::int64_t>(kept.size());

    // Preconditions: hermiticity and block structure against the projector.
    double herm2 = 0.0, cross2 = 0.0;
    Eigen::MatrixXcd Hk = Eigen::MatrixXcd::Zero(nk, nk);
    for (int c = 0; c < H.outerSize(); ++c)
        for (SparseOp::InnerIterator it(H, c); it; ++it) {
            const std::complex<double> tr = H.coeff(it.col(), it.row());
            const std::complex<double> d = it.value() - std::conj(tr);
            herm2 += 0.5 * std::norm(d);  // each unordered pair counted twice
            const bool rk = sector.keep[static_cast<std::size_t>(it.row())];
            const bool ck = sector.keep[static_cast<std::size_t>(it.col())];
            if (rk != ck)
                cross2 += std::norm(it.value());
            else if (rk && ck)
                Hk(pos[static_cast<std::size_t>(it.row())], pos[static_cast<std::size_t>(it.col())]) +=
                    it.value();
        }
    char buf[96];
    if (std::sqrt(herm2) > commute_tol) {
        std::snprintf(buf, sizeof(buf), "%.6e", std::sqrt(herm2));
        throw domain_error(std::string("symmetric_eigenstates: operator is not hermitian, "
                                       "asymmetry norm ") + buf);
    }
    if (std::sqrt(cross2) > commute_tol) {
        std::snprintf(buf, sizeof(buf), "%.6e", std::sqrt(cross2));
        throw domain_error(std::string("symmetric_eigenstates: operator does not preserve the "
                                       "sector, leakage norm ") + buf);
    }

    SymmetricSpectrum out;
    out.kept = std::move(kept);
    out.ambient_dim = H.rows();
    if (nk == 0) {
        out.states = Eigen::MatrixXcd::Zero(0, 0);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Hk);
    out.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + nk);
    out.states = es.eigenvectors();

    // Canonical basis inside each degenerate cluster: project the standard
    // basis vectors through the cluster projector in index order, keep the
    // Gram-Schmidt survivors, and fix each phase by the first significant
    // amplitude. This removes any solver-dependent arbitrariness.
    double scale = 1.0;
    for (double e : out.energies) scale = std::max(scale, std::abs(e));
    const double cluster_tol = 1e-10 * scale;
    std::int64_t lo = 0;
    while (lo < nk) {
        std::int64_t hi = lo + 1;
        while (hi < nk && out.energies[static_cast<std::size_t>(hi)] -
                                  out.energies[static_cast<std::size_t>(hi - 1)] <=
                              cluster_tol)
            ++hi;
        const std::int64_t width = hi - lo;
        if (width > 1) {
            const Eigen::MatrixXcd V = out.states.middleCols(lo, width);
            Eigen::MatrixXcd W(nk, width);
            std::int64_t found = 0;
            for (std::int64_t j = 0; j < nk && found < width; ++j) {
                // w = P_cluster e_j, orthogonalized against earlier picks.
                Eigen::VectorXcd w = V * (V.adjoint() * Eigen::VectorXcd::Unit(nk, j));
                for (std::int64_t t = 0; t < found; ++t) w -= W.col(t) * (W.col(t).adjoint() * w);
                const double n = w.norm();
                if (n > 1e-8) W.col(found++) = w / n;
            }
            if (found == width) out.states.middleCols(lo, width) = W;
        }
        for (std::int64_t c = lo; c < hi; ++c) {
            Eigen::VectorXcd v = out.states.col(c);
            for (std::int64_t i = 0; i < nk; ++i)
                if (std::abs(v[i]) > 1e-8) {
                    v *= std::conj(v[i]) / std::abs(v[i]);
                    break;
                }
            out.states.col(c) = v;
        }
        lo = hi;
    }
    return out;
}

SymmetricSpectrum symmetric_eigenstates(const SparseOp& H, const HilbertModel& m,
                                        double commute_tol) {
    return symmetric_eigenstates(H, projector_inv(m), commute_tol);
}

}  // namespace hfent
