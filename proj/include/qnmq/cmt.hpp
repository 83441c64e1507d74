#pragma once

#include <algorithm>
#include <array>
#include <utility>

#include "core.hpp"

namespace qnmq {

enum class Role { loss, gain };

struct BareMode {
    ComplexFreq freq;
    Role role = Role::loss;
    std::string label;
    cplx refractive_index{1.0, 0.0};
    cplx field_at_emitter{0.0, 0.0};

    void validate() const {
        if (!(freq.omega > 0.0)) throw Error(ErrorKind::ValidationError, label + ": omega must be > 0");
        if (role == Role::loss && refractive_index.imag() < 0.0)
            throw Error(ErrorKind::ValidationError, label + ": loss resonator needs Im(n) >= 0");
        if (role == Role::gain && !(refractive_index.imag() < 0.0))
            throw Error(ErrorKind::ValidationError, label + ": gain resonator needs Im(n) < 0");
    }
};

struct CmtCoupling {
    cplx kappa_LG{0.0, 0.0};
    cplx kappa_GL{0.0, 0.0};
};

struct HybridSystem {
    ComplexFreq freq_plus, freq_minus;
    // row 0: "+" hybrid, row 1: "-" hybrid; columns (L, G)
    Eigen::Matrix2cd coeffs;
    CVector raw_couplings;

    std::vector<ComplexFreq> freqs() const { return {freq_plus, freq_minus}; }
};

inline cplx cmt_discriminant(cplx wL, cplx wG, const CmtCoupling& k) {
    return 4.0 * k.kappa_LG * k.kappa_GL + (wL - wG) * (wL - wG);
}

inline bool is_exceptional_point(const ComplexFreq& wL, const ComplexFreq& wG, const CmtCoupling& k,
                                 double tol = 1e-12) {
    cplx s = wL.value() + wG.value();
    return std::abs(cmt_discriminant(wL.value(), wG.value(), k)) < tol * std::norm(s);
}

// Sorted so that the first entry has the larger real part (tie: larger imaginary part).
inline std::pair<ComplexFreq, ComplexFreq> hybrid_frequencies(const ComplexFreq& wL, const ComplexFreq& wG,
                                                               const CmtCoupling& k) {
    cplx a = wL.value(), b = wG.value();
    cplx root = std::sqrt(cmt_discriminant(a, b, k));
    cplx p = 0.5 * (a + b) + 0.5 * root;
    cplx m = 0.5 * (a + b) - 0.5 * root;
    bool swap = m.real() > p.real() || (m.real() == p.real() && m.imag() > p.imag());
    if (swap) std::swap(p, m);
    return {ComplexFreq::from_complex(p), ComplexFreq::from_complex(m)};
}

inline CmtCoupling cmt_coupling(const ComplexFreq& wL, const ComplexFreq& wG, cplx overlap_LG, cplx overlap_GL) {
    return {0.5 * wG.value() * overlap_LG, 0.5 * wL.value() * overlap_GL};
}

namespace detail {

// sqrt(n2) on the branch that keeps Re(c_L) >= 0, so an uncoupled loss mode comes out as (1, 0).
inline cplx normalizer(cplx n2, cplx c_L_numerator) {
    cplx n = std::sqrt(n2);
    return (c_L_numerator / n).real() < 0.0 ? -n : n;
}

}  // namespace detail

inline std::pair<cplx, cplx> hybrid_coefficients(const ComplexFreq& w_pm, const ComplexFreq& wG, cplx kappa_GL,
                                                 double tol = 1e-12) {
    cplx d = w_pm.value() - wG.value();
    cplx n2 = d * d + kappa_GL * kappa_GL;
    if (std::abs(n2) < tol * std::norm(w_pm.value()))
        throw Error(ErrorKind::DegenerateHybrid, "self-orthogonal hybrid mode (exceptional point)");
    cplx n = detail::normalizer(n2, d);
    return {d / n, -kappa_GL / n};
}

// Left (adjoint) coefficients for a non-symmetric coupling; equal to the right ones when kappa_LG == kappa_GL.
// Right and left rows satisfy cL*dL + cG*dG = 1.
struct BiorthogonalCoeffs {
    std::array<cplx, 2> right;
    std::array<cplx, 2> left;
};

inline BiorthogonalCoeffs biorthogonal_coefficients(const ComplexFreq& w_pm, const ComplexFreq& wG,
                                                    const CmtCoupling& k, double tol = 1e-12) {
    cplx d = w_pm.value() - wG.value();
    cplx n2 = d * d + k.kappa_LG * k.kappa_GL;
    if (std::abs(n2) < tol * std::norm(w_pm.value()))
        throw Error(ErrorKind::DegenerateHybrid, "self-orthogonal hybrid mode (exceptional point)");
    cplx n = detail::normalizer(n2, d);
    return {{d / n, -k.kappa_GL / n}, {d / n, -k.kappa_LG / n}};
}

inline HybridSystem hybridize(const ComplexFreq& wL, const ComplexFreq& wG, const CmtCoupling& k,
                              double ep_tol = 1e-12) {
    if (is_exceptional_point(wL, wG, k, ep_tol))
        throw Error(ErrorKind::DegenerateHybrid, "bare parameters sit on an exceptional point");
    auto [p, m] = hybrid_frequencies(wL, wG, k);
    HybridSystem h;
    h.freq_plus = p;
    h.freq_minus = m;
    auto cp = hybrid_coefficients(p, wG, k.kappa_GL);
    auto cm = hybrid_coefficients(m, wG, k.kappa_GL);
    h.coeffs << cp.first, cp.second, cm.first, cm.second;
    return h;
}

// Raw coupling g~ = -i sqrt(omega * scale / 2) f~(r_a), scale = d^2/(hbar eps0) in the caller's units.
inline cplx raw_coupling(const ComplexFreq& w, cplx field_at_emitter, double scale) {
    return -I1 * std::sqrt(0.5 * w.omega * scale) * field_at_emitter;
}

// Improved phenomenological two-mode model: bare loss mode (omega_L - i gamma_L), pumped gain mode
// (omega_G + i gamma_G), real photon coupling kappa entering as -kappa, real emitter couplings g_L, g_G.
struct PhenParams {
    double omega_L = 0.0, gamma_L = 0.0;
    double omega_G = 0.0, gamma_G = 0.0;
    double kappa = 0.0;
    double g_L = 0.0, g_G = 0.0;
};

// kappa = Re(kappa_LG + kappa_GL)/2 from the CMT coupling.
inline double phen_kappa(const CmtCoupling& k) { return 0.5 * (k.kappa_LG + k.kappa_GL).real(); }

// g = sqrt(omega s / 2) |Re f~(r_a)| for a lossless-mode approximation of the bare field.
inline double phen_coupling(double omega, cplx field_at_emitter, double scale) {
    return std::sqrt(0.5 * omega * scale) * std::abs(field_at_emitter.real());
}

enum class GreenForm { hybrid_diagonal, bare_nondiagonal };

struct GreenInputs {
    ComplexFreq wL, wG;
    CmtCoupling kappa;
    cplx fL_r, fL_r0;  // bare loss-mode field at r and r0
    cplx fG_r, fG_r0;  // bare gain-mode field at r and r0
};

inline void check_pole(cplx w_mode, double omega, double tol) {
    if (std::abs(w_mode - omega) < tol * std::max(1.0, std::abs(w_mode)))
        throw Error(ErrorKind::PoleHit, "Green function evaluated on a pole");
}

namespace detail {

// Right/left eigenvectors for eigenvalue w, taken from whichever row of the CMT matrix is better conditioned.
// Unlike biorthogonal_coefficients this also covers the uncoupled case, where one row vanishes.
inline BiorthogonalCoeffs eigen_pair(cplx w, cplx wL, cplx wG, const CmtCoupling& k, double tol = 1e-12) {
    std::array<cplx, 2> r{w - wG, -k.kappa_GL}, l{w - wG, -k.kappa_LG};
    std::array<cplx, 2> r2{-k.kappa_LG, w - wL}, l2{-k.kappa_GL, w - wL};
    auto size = [](const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
        return std::norm(a[0]) + std::norm(a[1]) + std::norm(b[0]) + std::norm(b[1]);
    };
    if (size(r2, l2) > size(r, l)) {
        r = r2;
        l = l2;
    }
    cplx n2 = r[0] * l[0] + r[1] * l[1];
    if (std::abs(n2) < tol * 0.5 * size(r, l))
        throw Error(ErrorKind::DegenerateHybrid, "self-orthogonal hybrid mode (exceptional point)");
    cplx n = std::sqrt(n2);
    return {{r[0] / n, r[1] / n}, {l[0] / n, l[1] / n}};
}

}  // namespace detail

// Scalar G_zz(r, r0, omega) from the two-mode QNM expansion.
inline cplx green_function(const GreenInputs& in, double omega, GreenForm form, double pole_tol = 1e-14) {
    if (form == GreenForm::bare_nondiagonal) {
        auto [p, m] = hybrid_frequencies(in.wL, in.wG, in.kappa);
        check_pole(p.value(), omega, pole_tol);
        check_pole(m.value(), omega, pole_tol);
        cplx wl = in.wL.value(), wg = in.wG.value();
        cplx num = omega * (wg - omega) * in.fL_r * in.fL_r0 + omega * in.kappa.kappa_LG * in.fL_r * in.fG_r0 +
                   omega * in.kappa.kappa_GL * in.fG_r * in.fL_r0 + omega * (wl - omega) * in.fG_r * in.fG_r0;
        return num / (2.0 * (p.value() - omega) * (m.value() - omega));
    }
    auto [p, m] = hybrid_frequencies(in.wL, in.wG, in.kappa);
    check_pole(p.value(), omega, pole_tol);
    check_pole(m.value(), omega, pole_tol);
    cplx sum{0.0, 0.0};
    for (const ComplexFreq& w : {p, m}) {
        BiorthogonalCoeffs c = detail::eigen_pair(w.value(), in.wL.value(), in.wG.value(), in.kappa);
        cplx f_r = c.right[0] * in.fL_r + c.right[1] * in.fG_r;
        cplx f_r0 = c.left[0] * in.fL_r0 + c.left[1] * in.fG_r0;
        sum += omega * f_r * f_r0 / (2.0 * (w.value() - omega));
    }
    return sum;
}

// Single-pole contribution omega f(r) f(r0) / (2 (w~ - omega)).
inline cplx green_single_mode(const ComplexFreq& w, cplx f_r, cplx f_r0, double omega, double pole_tol = 1e-14) {
    check_pole(w.value(), omega, pole_tol);
    return omega * f_r * f_r0 / (2.0 * (w.value() - omega));
}

// Im(G_total) / Im(G_B); G_total is the full projected Green function including the background.
inline double projected_ldos(cplx green_total, double im_GB) {
    if (!(im_GB > 0.0)) throw Error(ErrorKind::NonPositiveBackground, "im_GB must be > 0");
    return green_total.imag() / im_GB;
}

// Background plus two-mode QNM contribution at r = r0 = r_a.
inline double qnm_projected_ldos(const GreenInputs& in, double omega, double im_GB,
                                 GreenForm form = GreenForm::hybrid_diagonal) {
    return projected_ldos(cplx(0.0, im_GB) + green_function(in, omega, form), im_GB);
}

}  // namespace qnmq
