#pragma once

#include <cmath>
#include <optional>

#include <Eigen/Eigenvalues>

#include "cmt.hpp"
#include "symm.hpp"

namespace qnmq {

struct TlsRates {
    double gamma_loss = 0.0;
    double gamma_gain = 0.0;
    double gamma_B = 0.0;
    double lamb_loss = 0.0;  // reported, not used in populations
    double lamb_gain = 0.0;
};

namespace detail {

// sum g_eta S~_{eta eta'} g*_eta' [i(w_eta - w_eta') + (gam_eta + gam_eta')] / ((D_eta - i gam_eta)(D_eta' + i gam_eta'))
// with S~ = S (loss) or S^T (gain) and D_eta = omega_eta - omega_a.
inline double rate_double_sum(const CVector& g, const CMatrix& S, const std::vector<ComplexFreq>& freqs,
                              double omega_a, bool swapped, const char* who) {
    const auto n = static_cast<Eigen::Index>(freqs.size());
    if (g.size() != n) throw Error(ErrorKind::DimensionMismatch, std::string(who) + ": coupling count");
    require_square(S, n, who);
    cplx sum{0.0, 0.0};
    double scale = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            const ComplexFreq& wa = freqs[a];
            const ComplexFreq& wb = freqs[b];
            cplx s = swapped ? S(b, a) : S(a, b);
            cplx num = I1 * (wa.omega - wb.omega) + (wa.gamma + wb.gamma);
            cplx den = cplx(wa.omega - omega_a, -wa.gamma) * cplx(wb.omega - omega_a, wb.gamma);
            cplx term = g(a) * s * std::conj(g(b)) * num / den;
            sum += term;
            scale += std::abs(term);
        }
    }
    if (std::abs(sum.imag()) > 1e-9 * std::max(scale, 1e-300))
        throw Error(ErrorKind::ConventionViolation,
                    std::string(who) + ": imaginary residue " + std::to_string(sum.imag()) + " relative to " +
                        std::to_string(scale));
    return sum.real();
}

}  // namespace detail

inline double gamma_loss(const CVector& raw, const CMatrix& S_L, const std::vector<ComplexFreq>& freqs,
                         double omega_a) {
    require_quantum_modes(freqs, "gamma_loss");
    return detail::rate_double_sum(raw, S_L, freqs, omega_a, false, "gamma_loss");
}

inline double gamma_gain(const CVector& raw, const CMatrix& S_G, const std::vector<ComplexFreq>& freqs,
                         double omega_a) {
    require_quantum_modes(freqs, "gamma_gain");
    return detail::rate_double_sum(raw, S_G, freqs, omega_a, true, "gamma_gain");
}

// Single-sum complex rate sum g_eta S~_{eta eta'} g*_eta' (-i)/(D_eta - i gam_eta) = Gamma/2 + i omega_LS.
inline cplx gamma_tilde(const CVector& raw, const CMatrix& S, const std::vector<ComplexFreq>& freqs, double omega_a,
                        bool gain) {
    const auto n = static_cast<Eigen::Index>(freqs.size());
    if (raw.size() != n) throw Error(ErrorKind::DimensionMismatch, "gamma_tilde: coupling count");
    require_square(S, n, "gamma_tilde");
    cplx sum{0.0, 0.0};
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            cplx s = gain ? S(b, a) : S(a, b);
            sum += raw(a) * s * std::conj(raw(b)) * (-I1) / cplx(freqs[a].omega - omega_a, -freqs[a].gamma);
        }
    return sum;
}

inline TlsRates tls_rates(const CVector& raw, const CMatrix& S_L, const std::optional<CMatrix>& S_G,
                          const std::vector<ComplexFreq>& freqs, double omega_a, double gamma_B) {
    TlsRates r;
    r.gamma_B = gamma_B;
    r.gamma_loss = gamma_loss(raw, S_L, freqs, omega_a);
    r.lamb_loss = gamma_tilde(raw, S_L, freqs, omega_a, false).imag();
    if (S_G) {
        r.gamma_gain = gamma_gain(raw, *S_G, freqs, omega_a);
        r.lamb_gain = gamma_tilde(raw, *S_G, freqs, omega_a, true).imag();
    }
    return r;
}

inline TlsRates tls_rates(const SymmSet& symm, const EmitterParams& emitter) {
    std::optional<CMatrix> sg;
    if (symm.has_gain) sg = symm.S_G;
    return tls_rates(emitter.raw_couplings, symm.S_L, sg, symm.freqs, emitter.omega_a, emitter.gamma_B);
}

inline double quantum_ldos(const TlsRates& r) {
    if (!(r.gamma_B > 0.0)) throw Error(ErrorKind::NonPositiveBackground, "gamma_B must be > 0");
    return 1.0 + (r.gamma_loss - r.gamma_gain) / r.gamma_B;
}

namespace detail {

inline double total_rate(const TlsRates& r) {
    // rounding-level negatives (quadratic forms evaluated far off resonance) are tolerated
    double floor = -1e-12 * (std::abs(r.gamma_loss) + std::abs(r.gamma_gain) + std::abs(r.gamma_B));
    if (!(r.gamma_loss >= floor) || !(r.gamma_gain >= floor) || !(r.gamma_B >= 0.0))
        throw Error(ErrorKind::ValidationError, "TLS rates must be nonnegative");
    return r.gamma_loss + r.gamma_gain + r.gamma_B;
}

}  // namespace detail

inline double n_excited_ss(const TlsRates& r) {
    double G = detail::total_rate(r);
    return G > 0.0 ? r.gamma_gain / G : 0.0;
}

// delta = Gamma_gain / (Gamma_loss + Gamma_B); n_ss = delta / (1 + delta)
inline double delta_ratio(const TlsRates& r) {
    detail::total_rate(r);
    return r.gamma_gain / (r.gamma_loss + r.gamma_B);
}

inline double n_excited(double t, const TlsRates& r, double n_e0) {
    double G = detail::total_rate(r);
    if (G == 0.0) return n_e0;
    double e = std::exp(-G * t);
    return e * n_e0 + (r.gamma_gain / G) * (-std::expm1(-G * t));
}

struct PhenRates {
    double gamma_ldos = 0.0;
    double gamma_gain = 0.0;
    double gamma_loss = 0.0;
};

// Complex photon matrix of the phenomenological model; legacy uses +i kappa off-diagonals.
inline Eigen::Matrix2cd phen_matrix(const PhenParams& p, bool legacy_plus_i_kappa = false) {
    Eigen::Matrix2cd m;
    cplx off = legacy_plus_i_kappa ? I1 * p.kappa : cplx(-p.kappa, 0.0);
    m << cplx(p.omega_L, -p.gamma_L), off, off, cplx(p.omega_G, p.gamma_G);
    return m;
}

inline PhenRates phen_rates(const PhenParams& p, double omega_a, bool legacy_plus_i_kappa = false) {
    // Work relative to the mean bare frequency: w_a - lambda is then a difference of small numbers and
    // keeps full relative precision near a high-Q resonance.
    const double shift = 0.5 * (p.omega_L + p.omega_G);
    Eigen::Matrix2cd om = phen_matrix(p, legacy_plus_i_kappa) - shift * Eigen::Matrix2cd::Identity();
    cplx disc = (om(0, 0) - om(1, 1)) * (om(0, 0) - om(1, 1)) + 4.0 * om(0, 1) * om(1, 0);
    if (std::abs(disc) < 1e-12 * std::norm(om(0, 0) + om(1, 1) + 2.0 * shift))
        throw Error(ErrorKind::DefectiveMatrix, "phenomenological photon matrix at its exceptional point");
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(om);
    const Eigen::Vector2cd lam = es.eigenvalues();
    const Eigen::Matrix2cd V = es.eigenvectors();
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(V);
    if (svd.singularValues()(1) < 1e-12 * svd.singularValues()(0))
        throw Error(ErrorKind::DefectiveMatrix, "phenomenological photon matrix not diagonalizable");
    const Eigen::Matrix2cd Vi = V.inverse();
    const double g[2] = {p.g_L, p.g_G};
    const int G = 1;

    double ldos = 0.0, gain = 0.0;
    for (int j = 0; j < 2; ++j) {
        cplx kernel = I1 / ((omega_a - shift) - lam(j));
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) {
                cplx T = V(i, j) * Vi(j, k);
                ldos += 2.0 * g[i] * g[k] * (T * kernel).real();
                cplx Tp{0.0, 0.0};
                for (int n = 0; n < 2; ++n)
                    Tp += V(i, j) * std::conj(V(k, n)) * (2.0 * p.gamma_G) / (I1 * (lam(j) - std::conj(lam(n)))) *
                          Vi(j, G) * std::conj(Vi(n, G));
                gain += 2.0 * g[i] * g[k] * (Tp * kernel).real();
            }
    }
    return {ldos, gain, ldos + gain};
}

struct QnmSystem {
    std::vector<ComplexFreq> freqs;
    CVector raw_couplings;
    CMatrix S_L;
    std::optional<CMatrix> S_G;
};

struct CompareRow {
    double omega_a = 0.0;
    TlsRates qnm;
    PhenRates phen;
    double n_ss_qnm = 0.0;
    double n_ss_phen = 0.0;
    double ldos_quant = 0.0;
};

inline std::vector<CompareRow> compare_models(const QnmSystem& sys, const PhenParams& phen, double gamma_B,
                                              const std::vector<double>& omega_a) {
    std::vector<CompareRow> rows;
    rows.reserve(omega_a.size());
    for (double wa : omega_a) {
        CompareRow r;
        r.omega_a = wa;
        r.qnm = tls_rates(sys.raw_couplings, sys.S_L, sys.S_G, sys.freqs, wa, gamma_B);
        r.phen = phen_rates(phen, wa);
        r.n_ss_qnm = n_excited_ss(r.qnm);
        TlsRates pr{r.phen.gamma_loss, r.phen.gamma_gain, gamma_B, 0.0, 0.0};
        r.n_ss_phen = n_excited_ss(pr);
        r.ldos_quant = quantum_ldos(r.qnm);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace qnmq
