#pragma once

#include <limits>
#include <optional>

#include <Eigen/SVD>

#include "linalg.hpp"

namespace qnmq {

// K_{mu eta} = sqrt(omega_mu omega_eta) / (i (w~_mu - w~_eta^*)); Hermitian by construction.
inline CMatrix pole_kernel(const std::vector<ComplexFreq>& freqs) {
    const auto n = static_cast<Eigen::Index>(freqs.size());
    CMatrix k(n, n);
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index e = 0; e < n; ++e)
            k(m, e) = std::sqrt(freqs[m].omega * freqs[e].omega) /
                      (I1 * (freqs[m].value() - std::conj(freqs[e].value())));
    return k;
}

// The gain commutator integrates A_mu^* A_eta instead of A_mu A_eta^*, so its pole
// kernel is the transpose: sqrt(omega_mu omega_eta) / (i (w~_eta - w~_mu^*)).
inline CMatrix gain_pole_kernel(const std::vector<ComplexFreq>& freqs) {
    return pole_kernel(freqs).transpose();
}

// Inverse of the pole map: I = S o (i (w~_mu - w~_eta^*)) / sqrt(omega_mu omega_eta).
inline CMatrix overlap_from_s(const CMatrix& s, const std::vector<ComplexFreq>& freqs) {
    require_square(s, static_cast<Eigen::Index>(freqs.size()), "overlap_from_s");
    return s.cwiseQuotient(pole_kernel(freqs));
}

inline CMatrix overlap_from_s_gain(const CMatrix& s, const std::vector<ComplexFreq>& freqs) {
    require_square(s, static_cast<Eigen::Index>(freqs.size()), "overlap_from_s_gain");
    return s.cwiseQuotient(gain_pole_kernel(freqs));
}

namespace detail {

inline CMatrix checked_pd(const CMatrix& s, const std::string& who) {
    CMatrix h = hermitize(s, who);
    auto rep = definiteness_report(h);
    if (!rep.positive)
        throw Error(ErrorKind::NotPositiveDefinite,
                    who + ": smallest eigenvalue " + std::to_string(rep.eigenvalues.size() ? rep.eigenvalues(0) : 0.0));
    return h;
}

}  // namespace detail

inline CMatrix s_loss(const CMatrix& I_nrad, const std::optional<CMatrix>& I_rad, const std::vector<ComplexFreq>& freqs) {
    require_quantum_modes(freqs, "s_loss");
    const auto n = static_cast<Eigen::Index>(freqs.size());
    require_square(I_nrad, n, "s_loss I_nrad");
    CMatrix total = hermitize(I_nrad, "s_loss I_nrad");
    if (I_rad) {
        require_square(*I_rad, n, "s_loss I_rad");
        total += *I_rad + I_rad->adjoint();
    }
    return detail::checked_pd(pole_kernel(freqs).cwiseProduct(total), "s_loss");
}

inline CMatrix s_gain(const CMatrix& I_gain, const std::vector<ComplexFreq>& freqs) {
    require_quantum_modes(freqs, "s_gain");
    require_square(I_gain, static_cast<Eigen::Index>(freqs.size()), "s_gain I_gain");
    CMatrix total = hermitize(I_gain, "s_gain I_gain");
    return detail::checked_pd(gain_pole_kernel(freqs).cwiseProduct(total), "s_gain");
}

inline CMatrix s_unified(const CMatrix& S_L, const CMatrix& S_G) {
    if (S_L.rows() != S_G.rows() || S_L.cols() != S_G.cols())
        throw Error(ErrorKind::DimensionMismatch, "s_unified: S_L and S_G shapes differ");
    return hermitize(S_L, "s_unified S_L") - hermitize(S_G, "s_unified S_G").conjugate();
}

inline double vacuum_occupation(const CMatrix& S_G, const CMatrix& S_prime) {
    if (S_G.rows() != S_prime.rows() || S_G.cols() != S_prime.cols())
        throw Error(ErrorKind::DimensionMismatch, "vacuum_occupation: shapes differ");
    Eigen::JacobiSVD<CMatrix> svd(S_prime);
    const RVector& sv = svd.singularValues();
    if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-14 * sv(0)))
        throw Error(ErrorKind::SingularSPrime, "S' is singular");
    cplx n = (S_G * S_prime.partialPivLu().inverse()).trace();
    if (std::abs(n.imag()) > 1e-9 * std::max(1.0, std::abs(n)))
        throw Error(ErrorKind::ConventionViolation, "n_vac has imaginary residue " + std::to_string(n.imag()));
    return n.real();
}

enum class Side { loss, gain };

struct ChiSeparated {
    CMatrix chi;    // S^{-1/2} diag(w) S^{1/2}, w = w~ (loss) or w~^* (gain)
    CMatrix plus;   // (chi + chi^dag)/2
    CMatrix minus;  // chi = plus -/+ i minus for loss/gain
};

namespace detail {

// Entry (nu, nu') of fn(w~_nu, w~_nu') times m(nu, nu').
template <class F>
CMatrix freq_hadamard(const CMatrix& m, const std::vector<ComplexFreq>& freqs, F&& fn) {
    CMatrix out(m.rows(), m.cols());
    for (Eigen::Index a = 0; a < m.rows(); ++a)
        for (Eigen::Index b = 0; b < m.cols(); ++b) out(a, b) = fn(freqs[a].value(), freqs[b].value()) * m(a, b);
    return out;
}

inline CMatrix sandwich(const CMatrix& minus_half, const CMatrix& inner) {
    CMatrix r = minus_half * inner * minus_half;
    return (r + r.adjoint()) * 0.5;
}

inline cplx sum_plus(cplx a, cplx b) { return 0.5 * (a + std::conj(b)); }
inline cplx diff_minus(cplx a, cplx b) { return 0.5 * I1 * (a - std::conj(b)); }

}  // namespace detail

inline ChiSeparated chi_separated(const CMatrix& S, const std::vector<ComplexFreq>& freqs, Side which,
                                  const SqrtPair* root = nullptr) {
    require_square(S, static_cast<Eigen::Index>(freqs.size()), "chi_separated");
    SqrtPair local;
    if (!root) {
        local = principal_sqrt(S, "chi_separated");
        root = &local;
    }
    const auto n = static_cast<Eigen::Index>(freqs.size());
    CVector w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = which == Side::loss ? freqs[i].value() : std::conj(freqs[i].value());

    ChiSeparated c;
    c.chi = root->minus_half * w.asDiagonal() * root->half;
    if (which == Side::loss) {
        c.plus = detail::sandwich(root->minus_half, detail::freq_hadamard(S, freqs, detail::sum_plus));
        c.minus = detail::sandwich(root->minus_half, detail::freq_hadamard(S, freqs, detail::diff_minus));
    } else {
        c.plus = detail::sandwich(root->minus_half, detail::freq_hadamard(S, freqs, [](cplx a, cplx b) {
                                      return detail::sum_plus(b, a);
                                  }));
        c.minus = detail::sandwich(root->minus_half, detail::freq_hadamard(S, freqs, [](cplx a, cplx b) {
                                       return detail::diff_minus(b, a);
                                   }));
    }
    return c;
}

struct ChiUnified {
    CMatrix plus;
    CMatrix L_minus;
    CMatrix G_minus;
    CMatrix G_plus;  // only feeds the dropped constant energy C^gain = trace(G_plus)
};

inline ChiUnified chi_unified(const CMatrix& S_L, const CMatrix& S_G, const CMatrix& S_prime,
                              const std::vector<ComplexFreq>& freqs, const SqrtPair* prime_root = nullptr) {
    const auto n = static_cast<Eigen::Index>(freqs.size());
    require_square(S_L, n, "chi_unified S_L");
    require_square(S_G, n, "chi_unified S_G");
    require_square(S_prime, n, "chi_unified S'");
    SqrtPair local;
    if (!prime_root) {
        local = principal_sqrt(S_prime, "chi_unified S'");
        prime_root = &local;
    }
    const CMatrix& m = prime_root->minus_half;
    CMatrix sg_swapped = S_G.transpose();
    ChiUnified c;
    c.plus = detail::sandwich(m, detail::freq_hadamard(S_prime, freqs, detail::sum_plus));
    c.L_minus = detail::sandwich(m, detail::freq_hadamard(S_L, freqs, detail::diff_minus));
    c.G_minus = detail::sandwich(m, detail::freq_hadamard(sg_swapped, freqs, detail::diff_minus));
    c.G_plus = detail::sandwich(m, detail::freq_hadamard(sg_swapped, freqs, detail::sum_plus));
    return c;
}

enum class Picture { loss, gain, unified };

// loss/unified: g^s_mu = sum_eta [S^{1/2}]_{eta mu} g~_eta ; gain: g^s_mu = sum_eta [S^{1/2}]_{mu eta} g~_eta
inline CVector symmetrized_couplings(const CVector& raw, const CMatrix& S_half, Picture picture) {
    require_square(S_half, raw.size(), "symmetrized_couplings");
    if (picture == Picture::gain) return S_half * raw;
    return S_half.transpose() * raw;
}

struct SymmSet {
    std::vector<ComplexFreq> freqs;
    bool has_gain = false;
    CMatrix S_L, S_G, S_prime;
    SqrtPair sqrt_L, sqrt_G, sqrt_prime;
    ChiSeparated chi_L, chi_G;
    bool unified_valid = false;
    ChiUnified chi_prime;
    DefinitenessReport report_L, report_G, report_prime;
    DefinitenessReport report_effective_decay;  // chi'^{L-} - chi'^{G-}, valid only if unified_valid
    double n_vac = std::numeric_limits<double>::quiet_NaN();
    double c_gain = 0.0;

    Eigen::Index mode_count() const { return static_cast<Eigen::Index>(freqs.size()); }
    bool below_threshold() const { return unified_valid && report_effective_decay.positive; }
};

// S_G absent means the zero-gain pipeline: S^G is an exact zero matrix and gain channels are dropped.
inline SymmSet build_symm_set(const std::vector<ComplexFreq>& freqs, const CMatrix& S_L,
                              const std::optional<CMatrix>& S_G = std::nullopt) {
    require_quantum_modes(freqs, "build_symm_set");
    const auto n = static_cast<Eigen::Index>(freqs.size());
    require_square(S_L, n, "build_symm_set S_L");
    SymmSet s;
    s.freqs = freqs;
    s.S_L = detail::checked_pd(S_L, "S_L");
    s.report_L = definiteness_report(s.S_L);
    s.sqrt_L = principal_sqrt(s.S_L, "S_L");
    s.chi_L = chi_separated(s.S_L, freqs, Side::loss, &s.sqrt_L);
    s.has_gain = S_G.has_value();
    if (s.has_gain) {
        require_square(*S_G, n, "build_symm_set S_G");
        s.S_G = detail::checked_pd(*S_G, "S_G");
        s.report_G = definiteness_report(s.S_G);
        s.sqrt_G = principal_sqrt(s.S_G, "S_G");
        s.chi_G = chi_separated(s.S_G, freqs, Side::gain, &s.sqrt_G);
        s.S_prime = s_unified(s.S_L, s.S_G);
    } else {
        s.S_G = CMatrix::Zero(n, n);
        s.S_prime = s.S_L;
    }
    s.report_prime = definiteness_report(s.S_prime);
    try {
        s.n_vac = s.has_gain ? vacuum_occupation(s.S_G, s.S_prime) : 0.0;
    } catch (const Error&) {
        s.n_vac = std::numeric_limits<double>::quiet_NaN();
    }
    s.unified_valid = s.report_prime.positive;
    if (s.unified_valid) {
        s.sqrt_prime = s.has_gain ? principal_sqrt(s.S_prime, "S'") : s.sqrt_L;
        s.chi_prime = chi_unified(s.S_L, s.S_G, s.S_prime, freqs, &s.sqrt_prime);
        s.report_effective_decay = definiteness_report(s.chi_prime.L_minus - s.chi_prime.G_minus);
        s.c_gain = s.chi_prime.G_plus.trace().real();
    }
    return s;
}

}  // namespace qnmq
