#pragma once

#include <Eigen/Eigenvalues>

#include "fock.hpp"
#include "linalg.hpp"

namespace qnmq {

enum class JumpKind { lower, raise, tls_lower };

inline const char* jump_kind_name(JumpKind k) {
    switch (k) {
    case JumpKind::lower: return "lower";
    case JumpKind::raise: return "raise";
    case JumpKind::tls_lower: return "tls_lower";
    }
    return "?";
}

// lower:     sum R_{mu eta} [2 a_eta rho a_mu^dag - a_mu^dag a_eta rho - rho a_mu^dag a_eta]
// raise:     sum R_{mu eta} [2 a_mu^dag rho a_eta - a_eta a_mu^dag rho - rho a_eta a_mu^dag]
// tls_lower: R (1x1) [2 s- rho s+ - s+ s- rho - rho s+ s-]
struct Channel {
    std::string label;
    JumpKind kind = JumpKind::lower;
    std::vector<int> modes;  // bosonic mode indices the rate matrix refers to
    CMatrix rate;
};

struct LindbladModel {
    HilbertSpec spec;
    std::vector<std::string> mode_labels;
    std::vector<int> charge;  // +1 or -1 per mode, defines the conserved excitation number
    CMatrix mode_h;           // sum h_{ij} a_i^dag a_j
    CVector u;                // sum u_k a_k s+ + h.c.
    CVector v;                // sum v_k a_k^dag s+ + h.c.
    double omega_a = 0.0;
    double frame = 0.0;       // rotating-frame reference; H -> H - frame * N
    std::vector<Channel> channels;
};

inline void validate_model(const LindbladModel& m) {
    m.spec.validate();
    const Eigen::Index M = m.spec.mode_count;
    require_square(m.mode_h, M, "model mode_h");
    if (m.u.size() != M || m.v.size() != M || static_cast<Eigen::Index>(m.charge.size()) != M)
        throw Error(ErrorKind::DimensionMismatch, "model coupling/charge vectors must have one entry per mode");
    if (hermitian_defect(m.mode_h) > 1e-10) throw Error(ErrorKind::NotHermitian, "model mode Hamiltonian");
    for (const auto& c : m.channels) {
        if (c.kind == JumpKind::tls_lower) {
            require_square(c.rate, 1, "tls channel rate");
            if (!m.spec.includes_tls) throw Error(ErrorKind::ValidationError, "tls channel without TLS factor");
        } else {
            require_square(c.rate, static_cast<Eigen::Index>(c.modes.size()), "channel " + c.label);
            for (int k : c.modes)
                if (k < 0 || k >= M) throw Error(ErrorKind::DimensionMismatch, "channel " + c.label + ": bad mode");
        }
        if (hermitian_defect(c.rate) > 1e-10) throw Error(ErrorKind::NotHermitian, "channel " + c.label);
        if (c.rate.size() > 0) {
            Eigen::SelfAdjointEigenSolver<CMatrix> es((c.rate + c.rate.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
            double scale = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
            if (es.eigenvalues()(0) < -1e-10 * scale)
                throw Error(ErrorKind::NotPositiveDefinite, "channel " + c.label + " rate matrix not PSD");
        }
    }
}

struct Operators {
    std::vector<SpMat> a;
    SpMat sm;
    SpMat number;  // conserved excitation number N
    Eigen::Index dim = 0;
};

inline Operators make_operators(const HilbertSpec& spec, const std::vector<int>& charge) {
    Operators ops;
    ops.dim = static_cast<Eigen::Index>(spec.dimension());
    for (int k = 0; k < spec.mode_count; ++k) ops.a.push_back(fock::annihilation(spec, k));
    ops.number = SpMat(ops.dim, ops.dim);
    for (int k = 0; k < spec.mode_count; ++k)
        ops.number += static_cast<double>(charge[k]) * SpMat(ops.a[k].adjoint() * ops.a[k]);
    if (spec.includes_tls) {
        ops.sm = fock::sigma_minus(spec);
        ops.number += SpMat(ops.sm.adjoint() * ops.sm);
    }
    return ops;
}

inline SpMat hamiltonian(const LindbladModel& m, const Operators& ops) {
    SpMat h(ops.dim, ops.dim);
    const Eigen::Index M = m.spec.mode_count;
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < M; ++j)
            if (m.mode_h(i, j) != cplx(0.0)) h += m.mode_h(i, j) * SpMat(ops.a[i].adjoint() * ops.a[j]);
    if (m.spec.includes_tls) {
        SpMat sp = ops.sm.adjoint();
        SpMat coupling(ops.dim, ops.dim);
        for (Eigen::Index k = 0; k < M; ++k) {
            if (m.u(k) != cplx(0.0)) coupling += m.u(k) * SpMat(ops.a[k] * sp);
            if (m.v(k) != cplx(0.0)) coupling += m.v(k) * SpMat(SpMat(ops.a[k].adjoint()) * sp);
        }
        h += coupling + SpMat(coupling.adjoint());
        h += m.omega_a * SpMat(sp * ops.sm);
    }
    if (m.frame != 0.0) h -= m.frame * ops.number;
    h.prune(cplx(0.0));
    return h;
}

// Generic-form jump data: every channel becomes sum_{mu eta} R_{mu eta} [2 J_eta rho J_mu^dag - ...].
struct GeneratorOps {
    Eigen::Index dim = 0;
    SpMat H;
    SpMat H_eff;  // H - i sum_channels A, A = sum R_{mu eta} J_mu^dag J_eta
    std::vector<SpMat> J;
    std::vector<SpMat> K;  // K_eta = sum_mu conj(R_{mu eta}) J_mu, jump term 2 J_eta rho K_eta^dag
    SpMat H_eff_adj;
    std::vector<SpMat> K_adj;
    RVector number_diag;           // diagonal of the excitation number N in the Fock basis
    bool conserves_number = false;  // generator commutes with the U(1) rotation generated by N
};

inline GeneratorOps make_generator(const LindbladModel& m, bool diagonalized = false) {
    validate_model(m);
    Operators ops = make_operators(m.spec, m.charge);
    GeneratorOps g;
    g.dim = ops.dim;
    g.H = hamiltonian(m, ops);
    SpMat anti(ops.dim, ops.dim);
    for (const auto& c : m.channels) {
        std::vector<SpMat> base;
        CMatrix R;
        if (c.kind == JumpKind::tls_lower) {
            base.push_back(ops.sm);
            R = c.rate;
        } else {
            for (int k : c.modes) base.push_back(c.kind == JumpKind::lower ? ops.a[k] : SpMat(ops.a[k].adjoint()));
            // raise channels in generic form use the transposed rate matrix
            R = c.kind == JumpKind::lower ? c.rate : CMatrix(c.rate.transpose());
        }
        std::vector<SpMat> Js;
        CMatrix Rg;
        if (diagonalized) {
            Eigen::SelfAdjointEigenSolver<CMatrix> es((R + R.adjoint()) * 0.5);
            const CMatrix& U = es.eigenvectors();
            for (Eigen::Index k = 0; k < U.cols(); ++k) {
                SpMat L(ops.dim, ops.dim);
                for (std::size_t e = 0; e < base.size(); ++e) L += std::conj(U(e, k)) * base[e];
                Js.push_back(L);
            }
            Rg = es.eigenvalues().cast<cplx>().asDiagonal();
        } else {
            Js = base;
            Rg = R;
        }
        const auto n = static_cast<Eigen::Index>(Js.size());
        for (Eigen::Index eta = 0; eta < n; ++eta) {
            SpMat Kt(ops.dim, ops.dim);
            bool any = false;
            for (Eigen::Index mu = 0; mu < n; ++mu) {
                if (Rg(mu, eta) == cplx(0.0)) continue;
                Kt += std::conj(Rg(mu, eta)) * Js[mu];
                anti += Rg(mu, eta) * SpMat(SpMat(Js[mu].adjoint()) * Js[eta]);
                any = true;
            }
            if (any) {
                g.J.push_back(Js[eta]);
                g.K.push_back(Kt);
            }
        }
    }
    g.number_diag = RVector(ops.dim);
    for (Eigen::Index i = 0; i < ops.dim; ++i) g.number_diag(i) = ops.number.coeff(i, i).real();
    {
        // structural check: every Hamiltonian matrix element connects states of equal N
        bool ok = true;
        for (Eigen::Index k = 0; k < g.H.outerSize(); ++k)
            for (SpMat::InnerIterator it(g.H, k); it; ++it)
                if (it.value() != cplx(0.0) && std::abs(g.number_diag(it.row()) - g.number_diag(it.col())) > 0.5)
                    ok = false;
        for (const auto& c : m.channels)
            for (int k : c.modes) ok = ok && m.charge[k] == m.charge[c.modes.front()];
        g.conserves_number = ok;
    }
    g.H_eff = g.H - I1 * anti;
    g.H_eff.prune(cplx(0.0));
    g.H_eff_adj = g.H_eff.adjoint();
    for (const auto& k : g.K) g.K_adj.push_back(k.adjoint());
    return g;
}

// drho/dt on a dense density matrix.
inline CMatrix lindblad_rhs(const GeneratorOps& g, const CMatrix& rho) {
    CMatrix hr = g.H_eff * rho;
    CMatrix rh = rho * g.H_eff_adj;
    CMatrix out = -I1 * (hr - rh);
    for (std::size_t k = 0; k < g.J.size(); ++k) {
        CMatrix jr = g.J[k] * rho;
        out += 2.0 * (jr * g.K_adj[k]);
    }
    return out;
}

inline CMatrix lindblad_rhs(const LindbladModel& m, const CMatrix& rho) {
    GeneratorOps g = make_generator(m);
    if (rho.rows() != g.dim || rho.cols() != g.dim)
        throw Error(ErrorKind::DimensionMismatch, "density matrix dimension does not match model");
    return lindblad_rhs(g, rho);
}

namespace detail {

// Appends alpha * (P (x) Q) restricted by `index` (vec index -> kept index, -1 dropped; empty keeps all).
inline void kron_triplets(const SpMat& P, const SpMat& Q, cplx alpha, Eigen::Index d,
                          const std::vector<Eigen::Index>& index, std::vector<Eigen::Triplet<cplx>>& out) {
    for (Eigen::Index pc = 0; pc < P.outerSize(); ++pc)
        for (SpMat::InnerIterator pi(P, pc); pi; ++pi)
            for (Eigen::Index qc = 0; qc < Q.outerSize(); ++qc)
                for (SpMat::InnerIterator qi(Q, qc); qi; ++qi) {
                    Eigen::Index r = pi.row() * d + qi.row();
                    Eigen::Index c = pi.col() * d + qc;
                    if (!index.empty()) {
                        r = index[static_cast<std::size_t>(r)];
                        c = index[static_cast<std::size_t>(c)];
                        if (r < 0 || c < 0) continue;
                    }
                    out.emplace_back(r, c, alpha * pi.value() * qi.value());
                }
}

}  // namespace detail

// Vectorized generator (column stacking): vec(A X B) = (B^T (x) A) vec(X).
// `index` optionally restricts to an invariant subset of vec entries (see steady_state).
inline SpMat liouvillian(const GeneratorOps& g, const std::vector<Eigen::Index>& index = {}, Eigen::Index n = -1) {
    const Eigen::Index d = g.dim;
    if (n < 0) n = d * d;
    SpMat id = fock::identity(d);
    std::vector<Eigen::Triplet<cplx>> t;
    detail::kron_triplets(id, g.H_eff, -I1, d, index, t);
    detail::kron_triplets(SpMat(g.H_eff.conjugate()), id, I1, d, index, t);
    for (std::size_t k = 0; k < g.J.size(); ++k)
        detail::kron_triplets(SpMat(g.K[k].conjugate()), g.J[k], 2.0, d, index, t);
    SpMat L(n, n);
    L.setFromTriplets(t.begin(), t.end());
    L.prune(cplx(0.0));
    L.makeCompressed();
    return L;
}

// Linear drift of <a> with the emitter decoupled: d<a>/dt = K <a>.
inline CMatrix mode_drift(const LindbladModel& m) {
    CMatrix K = -I1 * m.mode_h;
    for (const auto& c : m.channels) {
        if (c.kind == JumpKind::tls_lower) continue;
        double s = c.kind == JumpKind::lower ? -1.0 : 1.0;
        for (std::size_t i = 0; i < c.modes.size(); ++i)
            for (std::size_t j = 0; j < c.modes.size(); ++j) K(c.modes[i], c.modes[j]) += s * c.rate(i, j);
    }
    return K;
}

inline void require_below_threshold(const LindbladModel& m) {
    if (m.spec.mode_count == 0) return;
    Eigen::ComplexEigenSolver<CMatrix> es(mode_drift(m), false);
    double worst = es.eigenvalues().real().maxCoeff();
    if (!(worst < 0.0))
        throw Error(ErrorKind::AboveThreshold,
                    "mode drift has eigenvalue with Re = " + std::to_string(worst) + " >= 0 (gain exceeds loss)");
}

}  // namespace qnmq
