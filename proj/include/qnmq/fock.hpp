#pragma once

#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "core.hpp"

namespace qnmq {

using SpMat = Eigen::SparseMatrix<cplx>;

// Ordering: bosonic modes first (mode 0 most significant), TLS factor last with |g> = 0, |e> = 1.
struct HilbertSpec {
    int mode_count = 0;
    int n_max = 1;
    bool includes_tls = true;
    std::size_t budget = 4096;

    std::size_t dimension() const {
        std::size_t d = includes_tls ? 2 : 1;
        for (int k = 0; k < mode_count; ++k) d *= static_cast<std::size_t>(n_max + 1);
        return d;
    }

    void validate() const {
        if (mode_count < 0) throw Error(ErrorKind::ValidationError, "mode_count must be >= 0");
        if (n_max < 1) throw Error(ErrorKind::ValidationError, "n_max must be >= 1");
        // overflow-safe budget check
        std::size_t d = includes_tls ? 2 : 1;
        for (int k = 0; k < mode_count; ++k) {
            d *= static_cast<std::size_t>(n_max + 1);
            if (d > budget) break;
        }
        if (d > budget)
            throw Error(ErrorKind::DimensionBudget, "Hilbert dimension exceeds budget " + std::to_string(budget));
    }
};

namespace fock {

inline SpMat identity(Eigen::Index n) {
    SpMat m(n, n);
    m.setIdentity();
    return m;
}

inline SpMat single_annihilation(int n_max) {
    SpMat a(n_max + 1, n_max + 1);
    std::vector<Eigen::Triplet<cplx>> t;
    for (int n = 1; n <= n_max; ++n) t.emplace_back(n - 1, n, std::sqrt(static_cast<double>(n)));
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

inline SpMat single_sigma_minus() {
    SpMat s(2, 2);
    s.insert(0, 1) = 1.0;
    s.makeCompressed();
    return s;
}

// Embeds a local operator acting on factor `slot` (0..mode_count-1 for modes, mode_count for the TLS).
inline SpMat embed(const HilbertSpec& spec, int slot, const SpMat& local) {
    const int factors = spec.mode_count + (spec.includes_tls ? 1 : 0);
    SpMat out = identity(1);
    for (int f = 0; f < factors; ++f) {
        Eigen::Index n = (f < spec.mode_count) ? spec.n_max + 1 : 2;
        SpMat piece = (f == slot) ? local : identity(n);
        SpMat next = Eigen::kroneckerProduct(out, piece);
        out = next;
    }
    out.makeCompressed();
    return out;
}

inline SpMat annihilation(const HilbertSpec& spec, int mode) {
    return embed(spec, mode, single_annihilation(spec.n_max));
}

inline SpMat sigma_minus(const HilbertSpec& spec) {
    if (!spec.includes_tls) throw Error(ErrorKind::ValidationError, "Hilbert space has no TLS factor");
    return embed(spec, spec.mode_count, single_sigma_minus());
}

// Basis index of |n_0, ..., n_{M-1}> (x) |tls>.
inline Eigen::Index basis_index(const HilbertSpec& spec, const std::vector<int>& photons, int tls) {
    Eigen::Index idx = 0;
    for (int k = 0; k < spec.mode_count; ++k) idx = idx * (spec.n_max + 1) + photons[k];
    if (spec.includes_tls) idx = idx * 2 + tls;
    return idx;
}

}  // namespace fock
}  // namespace qnmq
