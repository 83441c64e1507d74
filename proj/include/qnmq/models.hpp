#pragma once

#include "cmt.hpp"
#include "lindblad.hpp"
#include "symm.hpp"

namespace qnmq {

namespace detail {

inline Channel tls_channel(double gamma_B) {
    Channel c;
    c.label = "background";
    c.kind = JumpKind::tls_lower;
    c.rate = CMatrix::Constant(1, 1, cplx(0.5 * gamma_B, 0.0));
    return c;
}

inline std::vector<int> mode_range(int first, int count) {
    std::vector<int> r(count);
    for (int i = 0; i < count; ++i) r[i] = first + i;
    return r;
}

}  // namespace detail

// Modes 0..N-1 are loss-region operators, N..2N-1 gain-region operators (absent without gain).
inline LindbladModel build_separated(const SymmSet& symm, const EmitterParams& emitter, HilbertSpec spec) {
    emitter.validate();
    const int N = static_cast<int>(symm.mode_count());
    const int M = symm.has_gain ? 2 * N : N;
    if (emitter.raw_couplings.size() != N)
        throw Error(ErrorKind::DimensionMismatch, "emitter needs one raw coupling per hybrid mode");
    if (spec.mode_count != M)
        throw Error(ErrorKind::DimensionMismatch,
                    "separated picture needs " + std::to_string(M) + " bosonic modes, spec has " +
                        std::to_string(spec.mode_count));
    spec.validate();

    LindbladModel m;
    m.spec = spec;
    m.omega_a = emitter.omega_a;
    m.mode_h = CMatrix::Zero(M, M);
    m.u = CVector::Zero(M);
    m.v = CVector::Zero(M);
    m.charge.assign(M, 1);
    m.mode_h.topLeftCorner(N, N) = symm.chi_L.plus;
    m.u.head(N) = symmetrized_couplings(emitter.raw_couplings, symm.sqrt_L.half, Picture::loss);
    for (int i = 0; i < N; ++i) m.mode_labels.push_back("L" + std::to_string(i));

    Channel loss;
    loss.label = "chi_L_minus";
    loss.kind = JumpKind::lower;
    loss.modes = detail::mode_range(0, N);
    loss.rate = symm.chi_L.minus;
    m.channels.push_back(loss);

    if (symm.has_gain) {
        m.mode_h.bottomRightCorner(N, N) = -symm.chi_G.plus;
        m.v.tail(N) = symmetrized_couplings(emitter.raw_couplings, symm.sqrt_G.half, Picture::gain);
        for (int i = 0; i < N; ++i) {
            m.mode_labels.push_back("G" + std::to_string(i));
            m.charge[N + i] = -1;
        }
        Channel gain;
        gain.label = "chi_G_minus";
        gain.kind = JumpKind::lower;
        gain.modes = detail::mode_range(N, N);
        gain.rate = symm.chi_G.minus;
        m.channels.push_back(gain);
    }
    m.channels.push_back(detail::tls_channel(emitter.gamma_B));
    return m;
}

inline LindbladModel build_unified(const SymmSet& symm, const EmitterParams& emitter, HilbertSpec spec) {
    emitter.validate();
    if (!symm.unified_valid)
        throw Error(ErrorKind::UnifiedInvalid,
                    "S' = S_L - conj(S_G) is not positive definite; use the separated gain-loss picture");
    const int N = static_cast<int>(symm.mode_count());
    if (emitter.raw_couplings.size() != N)
        throw Error(ErrorKind::DimensionMismatch, "emitter needs one raw coupling per hybrid mode");
    if (spec.mode_count != N)
        throw Error(ErrorKind::DimensionMismatch, "unified picture needs " + std::to_string(N) + " bosonic modes");
    spec.validate();

    LindbladModel m;
    m.spec = spec;
    m.omega_a = emitter.omega_a;
    m.mode_h = symm.chi_prime.plus;
    m.u = symmetrized_couplings(emitter.raw_couplings, symm.sqrt_prime.half, Picture::unified);
    m.v = CVector::Zero(N);
    m.charge.assign(N, 1);
    for (int i = 0; i < N; ++i) m.mode_labels.push_back("U" + std::to_string(i));

    Channel loss;
    loss.label = "chi_prime_L_minus";
    loss.kind = JumpKind::lower;
    loss.modes = detail::mode_range(0, N);
    loss.rate = symm.chi_prime.L_minus;
    m.channels.push_back(loss);
    if (symm.has_gain) {
        Channel pump;
        pump.label = "chi_prime_G_minus";
        pump.kind = JumpKind::raise;
        pump.modes = detail::mode_range(0, N);
        pump.rate = symm.chi_prime.G_minus;
        m.channels.push_back(pump);
    }
    m.channels.push_back(detail::tls_channel(emitter.gamma_B));
    return m;
}

// Mode 0 = bare loss resonator, mode 1 = bare gain resonator.
inline LindbladModel build_phenomenological(const PhenParams& p, const EmitterParams& emitter, HilbertSpec spec) {
    emitter.validate();
    if (!(p.gamma_L > 0.0)) throw Error(ErrorKind::ValidationError, "phenomenological gamma_L must be > 0");
    if (!(p.gamma_G >= 0.0)) throw Error(ErrorKind::ValidationError, "phenomenological pump gamma_G must be >= 0");
    if (spec.mode_count != 2) throw Error(ErrorKind::DimensionMismatch, "phenomenological model has 2 modes");
    spec.validate();

    LindbladModel m;
    m.spec = spec;
    m.omega_a = emitter.omega_a;
    m.mode_h.resize(2, 2);
    m.mode_h << p.omega_L, -p.kappa, -p.kappa, p.omega_G;
    m.u.resize(2);
    m.u << I1 * p.g_L, I1 * p.g_G;
    m.v = CVector::Zero(2);
    m.charge = {1, 1};
    m.mode_labels = {"bL", "bG"};

    Channel loss;
    loss.label = "gamma_L";
    loss.kind = JumpKind::lower;
    loss.modes = {0};
    loss.rate = CMatrix::Constant(1, 1, p.gamma_L);
    m.channels.push_back(loss);
    if (p.gamma_G > 0.0) {
        Channel pump;
        pump.label = "gamma_G";
        pump.kind = JumpKind::raise;
        pump.modes = {1};
        pump.rate = CMatrix::Constant(1, 1, p.gamma_G);
        m.channels.push_back(pump);
    }
    m.channels.push_back(detail::tls_channel(emitter.gamma_B));
    return m;
}

}  // namespace qnmq
