#pragma once

#include <Eigen/Eigenvalues>

#include "core.hpp"

namespace qnmq {

inline double hermitian_defect(const CMatrix& m) {
    double scale = m.norm();
    if (scale == 0.0) return 0.0;
    return (m - m.adjoint()).norm() / scale;
}

// Returns (m + m^dag)/2 when the asymmetry is within rel_tol, throws otherwise.
inline CMatrix hermitize(const CMatrix& m, const std::string& who, double rel_tol = 1e-9) {
    if (m.rows() != m.cols()) throw Error(ErrorKind::DimensionMismatch, who + ": matrix not square");
    double d = hermitian_defect(m);
    if (d > rel_tol)
        throw Error(ErrorKind::NotHermitian, who + ": relative anti-Hermitian part " + std::to_string(d));
    return (m + m.adjoint()) * 0.5;
}

struct DefinitenessReport {
    RVector eigenvalues;  // ascending
    double min_over_max = 0.0;
    bool positive = false;
};

inline DefinitenessReport definiteness_report(const CMatrix& m) {
    CMatrix h = hermitize(m, "definiteness_report");
    DefinitenessReport r;
    if (h.rows() == 0) return r;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    r.eigenvalues = es.eigenvalues();
    double lo = r.eigenvalues(0), hi = r.eigenvalues(r.eigenvalues.size() - 1);
    r.min_over_max = hi != 0.0 ? lo / hi : 0.0;
    r.positive = lo > 0.0;
    return r;
}

struct SqrtPair {
    CMatrix half;
    CMatrix minus_half;
};

// Principal square root of a Hermitian positive definite matrix by spectral decomposition.
inline SqrtPair principal_sqrt(const CMatrix& m, const std::string& who = "principal_sqrt") {
    CMatrix h = hermitize(m, who);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const RVector& lam = es.eigenvalues();
    if (lam.size() == 0 || !(lam(0) > 0.0))
        throw Error(ErrorKind::NotPositiveDefinite,
                    who + ": smallest eigenvalue " + (lam.size() ? std::to_string(lam(0)) : std::string("n/a")));
    const CMatrix& u = es.eigenvectors();
    RVector s = lam.cwiseSqrt();
    SqrtPair p;
    p.half = u * s.asDiagonal() * u.adjoint();
    p.minus_half = u * s.cwiseInverse().asDiagonal() * u.adjoint();
    // exact Hermitian symmetry for downstream Hermiticity checks
    p.half = (p.half + p.half.adjoint()) * 0.5;
    p.minus_half = (p.minus_half + p.minus_half.adjoint()) * 0.5;
    return p;
}

}  // namespace qnmq
