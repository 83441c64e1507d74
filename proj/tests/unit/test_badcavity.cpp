#include <gtest/gtest.h>

#include "oracles.hpp"
#include "synthetic.hpp"

using namespace qnmq;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::ConfigError;
}

struct RandomSystem {
    std::vector<ComplexFreq> freqs;
    CMatrix S_L, S_G;
    CVector g;
    double omega_a;
};

RandomSystem random_system(oracle::Rng& rng) {
    RandomSystem s;
    std::vector<double> om, ga;
    for (int i = 0; i < 2; ++i) {
        om.push_back(rng.uniform(0.9, 1.1));
        ga.push_back(rng.uniform(1e-4, 2e-2));
        s.freqs.push_back({om.back(), ga.back()});
    }
    s.S_L = oracle::pole_s(rng.hpd(2, 0.01), om, ga);
    s.S_G = oracle::pole_s(rng.hpd(2, 0.01), om, ga);
    s.g.resize(2);
    s.g << rng.cnormal() * 1e-4, rng.cnormal() * 1e-4;
    s.omega_a = rng.uniform(0.85, 1.15);
    return s;
}

// Photon-propagator oracle for the phenomenological LDOS rate: 2 Re[i g^T (w_a - Omega)^{-1} g].
double green_oracle_ldos(const PhenParams& p, double wa) {
    oracle::CMatrix om(2, 2);
    om << cplx(p.omega_L, -p.gamma_L), -p.kappa, -p.kappa, cplx(p.omega_G, p.gamma_G);
    oracle::CMatrix res = oracle::inverse2(oracle::CMatrix(wa * oracle::CMatrix::Identity(2, 2) - om));
    Eigen::Vector2cd g(p.g_L, p.g_G);
    return 2.0 * (cplx(0, 1) * (g.transpose() * res * g)(0, 0)).real();
}

}  // namespace

TEST(GammaLoss, SingleModeAtResonance) {
    ComplexFreq wc{1.0, 2e-3};
    CMatrix S = CMatrix::Constant(1, 1, 1.7);
    CVector g = CVector::Constant(1, cplx(3e-5, -4e-5));
    EXPECT_NEAR(gamma_loss(g, S, {wc}, wc.omega), 2.0 * 1.7 * std::norm(g(0)) / wc.gamma, 1e-20);
    EXPECT_NEAR(gamma_gain(g, S, {wc}, wc.omega), 2.0 * 1.7 * std::norm(g(0)) / wc.gamma, 1e-20);
    // off resonance: Lorentzian 2 S |g|^2 gamma / (D^2 + gamma^2)
    double wa = 1.003;
    EXPECT_NEAR(gamma_loss(g, S, {wc}, wa),
                2.0 * 1.7 * std::norm(g(0)) * wc.gamma / (std::pow(wa - wc.omega, 2) + wc.gamma * wc.gamma), 1e-20);
}

TEST(GammaLoss, ZeroCouplingOrZeroGain) {
    synthetic::TwoMode sys;
    EXPECT_EQ(gamma_loss(CVector::Zero(2), sys.S_L, sys.freqs, 1.0), 0.0);
    EXPECT_EQ(gamma_gain(sys.emitter.raw_couplings, CMatrix::Zero(2, 2), sys.freqs, 1.0), 0.0);
    TlsRates r = tls_rates(sys.symm(false), sys.emitter);
    EXPECT_EQ(r.gamma_gain, 0.0);
    EXPECT_EQ(n_excited_ss(r), 0.0);
}

TEST(GammaLoss, DoubleSumEqualsSingleSumForm) {
    oracle::Rng rng(61);
    for (int t = 0; t < 1000; ++t) {
        RandomSystem s = random_system(rng);
        double loss = gamma_loss(s.g, s.S_L, s.freqs, s.omega_a);
        double gain = gamma_gain(s.g, s.S_G, s.freqs, s.omega_a);
        cplx tl = gamma_tilde(s.g, s.S_L, s.freqs, s.omega_a, false);
        cplx tg = gamma_tilde(s.g, s.S_G, s.freqs, s.omega_a, true);
        EXPECT_LT(std::abs(loss - 2.0 * tl.real()), 1e-12 * std::abs(loss));
        EXPECT_LT(std::abs(gain - 2.0 * tg.real()), 1e-12 * std::abs(gain));
        EXPECT_GE(loss, 0.0);
        EXPECT_GE(gain, 0.0);
    }
}

TEST(GammaLoss, OppositeDetuningConventionBreaksTheLock) {
    // with D = w_a - w_eta the cross terms no longer match the single-sum form
    oracle::Rng rng(62);
    RandomSystem s = random_system(rng);
    cplx sum{0.0, 0.0};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const auto &wa = s.freqs[a], &wb = s.freqs[b];
            cplx num = cplx(0, 1) * (wa.omega - wb.omega) + (wa.gamma + wb.gamma);
            cplx den = cplx(s.omega_a - wa.omega, -wa.gamma) * cplx(s.omega_a - wb.omega, wb.gamma);
            sum += s.g(a) * s.S_L(a, b) * std::conj(s.g(b)) * num / den;
        }
    double right = gamma_loss(s.g, s.S_L, s.freqs, s.omega_a);
    EXPECT_GT(std::abs(sum.real() - right), 1e-6 * right);
}

TEST(GammaLoss, LambShiftIsImaginaryPartOfSingleSum) {
    synthetic::TwoMode sys;
    TlsRates r = tls_rates(sys.symm(), sys.emitter);
    cplx tl = gamma_tilde(sys.emitter.raw_couplings, sys.S_L, sys.freqs, sys.emitter.omega_a, false);
    EXPECT_EQ(r.lamb_loss, tl.imag());
    EXPECT_NE(r.lamb_loss, 0.0);
}

TEST(QuantumLdos, Examples) {
    EXPECT_DOUBLE_EQ(quantum_ldos({3e-6, 3e-6, 1e-7, 0, 0}), 1.0);
    EXPECT_DOUBLE_EQ(quantum_ldos({3e-6, 0.0, 1e-7, 0, 0}), 31.0);
    EXPECT_LT(quantum_ldos({1e-7, 5e-7, 1e-7, 0, 0}), 0.0);
    EXPECT_EQ(kind_of([] { quantum_ldos({1.0, 0.0, 0.0, 0, 0}); }), ErrorKind::NonPositiveBackground);
}

TEST(ExcitedPopulation, SteadyStateExamples) {
    EXPECT_EQ(n_excited_ss({2e-6, 0.0, 1e-7, 0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(n_excited_ss({2e-6, 2.1e-6, 1e-7, 0, 0}), 0.5);
    EXPECT_EQ(kind_of([] { n_excited_ss({-1.0, 0.0, 1.0, 0, 0}); }), ErrorKind::ValidationError);
}

TEST(ExcitedPopulation, RatioFormAndBounds) {
    oracle::Rng rng(63);
    for (int t = 0; t < 10000; ++t) {
        TlsRates r{rng.uniform(0, 1) * std::pow(10.0, rng.uniform(-8, 0)), rng.uniform(0, 1) * std::pow(10.0, rng.uniform(-8, 0)),
                   rng.uniform(1e-9, 1.0), 0, 0};
        double n = n_excited_ss(r);
        double d = delta_ratio(r);
        EXPECT_GE(n, 0.0);
        EXPECT_LT(n, 1.0);
        EXPECT_NEAR(n, d / (1.0 + d), 1e-14);
    }
}

TEST(ExcitedPopulation, TransientSolvesRateEquation) {
    TlsRates r{3e-6, 1e-6, 2e-7, 0, 0};
    const double G = r.gamma_loss + r.gamma_gain + r.gamma_B;
    EXPECT_EQ(n_excited(0.0, r, 0.7), 0.7);
    EXPECT_NEAR(n_excited(50.0 / G, r, 0.7), n_excited_ss(r), 1e-15);
    for (double t : {1e4, 2e5, 7e5, 3e6}) {
        const double h = 1.0;
        double deriv = (n_excited(t + h, r, 0.9) - n_excited(t - h, r, 0.9)) / (2.0 * h);
        double n = n_excited(t, r, 0.9);
        double rhs = -(r.gamma_loss + r.gamma_B) * n + r.gamma_gain * (1.0 - n);
        EXPECT_NEAR(deriv, rhs, 1e-10 * (std::abs(rhs) + G));
    }
}

TEST(PhenRates, DecoupledIsSingleLorentzian) {
    PhenParams p{1.0, 1e-3, 1.004, 5e-4, 0.0, 2e-5, 0.0};
    for (double wa : {0.998, 1.0, 1.0013}) {
        PhenRates r = phen_rates(p, wa);
        double expect = 2.0 * p.g_L * p.g_L * p.gamma_L / (std::pow(wa - p.omega_L, 2) + p.gamma_L * p.gamma_L);
        EXPECT_NEAR(r.gamma_ldos, expect, 1e-12 * expect);
        EXPECT_NEAR(r.gamma_gain, 0.0, 1e-12 * expect);
    }
}

TEST(PhenRates, NoPumpNoGainRate) {
    PhenParams p{1.0, 1e-3, 1.001, 0.0, 6e-4, 2e-5, 1e-5};
    PhenRates r = phen_rates(p, 1.0004);
    EXPECT_EQ(r.gamma_gain, 0.0);
    EXPECT_EQ(r.gamma_loss, r.gamma_ldos);
    EXPECT_GT(r.gamma_ldos, 0.0);
}

TEST(PhenRates, LdosRateEqualsPropagatorForm) {
    oracle::Rng rng(64);
    for (int t = 0; t < 200; ++t) {
        PhenParams p{rng.uniform(0.99, 1.01), rng.uniform(1e-4, 1e-3), rng.uniform(0.99, 1.01), rng.uniform(0.0, 1e-4),
                     rng.uniform(-1e-3, 1e-3), rng.uniform(-1e-5, 1e-5), rng.uniform(-1e-5, 1e-5)};
        double wa = rng.uniform(0.985, 1.015);
        double expect = green_oracle_ldos(p, wa);
        EXPECT_LT(std::abs(phen_rates(p, wa).gamma_ldos - expect), 1e-10 * std::abs(expect) + 1e-22);
    }
}

TEST(PhenRates, KappaSignMattersForCrossTerms) {
    PhenParams p{1.0, 1e-3, 1.0008, 3e-4, 6e-4, 1e-5, 0.7e-5};
    PhenParams q = p;
    q.kappa = -p.kappa;
    PhenRates a = phen_rates(p, 1.0003), b = phen_rates(q, 1.0003);
    EXPECT_GT(std::abs(a.gamma_ldos - b.gamma_ldos), 1e-3 * a.gamma_ldos);
    EXPECT_GT(std::abs(a.gamma_gain - b.gamma_gain), 1e-3 * a.gamma_gain);
    // the legacy +i kappa form disagrees with the propagator identity
    PhenRates legacy = phen_rates(p, 1.0003, true);
    EXPECT_GT(std::abs(legacy.gamma_ldos - green_oracle_ldos(p, 1.0003)), 1e-3 * a.gamma_ldos);
    EXPECT_NEAR(a.gamma_ldos, green_oracle_ldos(p, 1.0003), 1e-10 * a.gamma_ldos);
}

// Classical field amplitudes of the matched phenomenological model: alpha = (w_a - Omega)^{-1} g.
TEST(CompareModels, HybridPairRatesFollowResonatorAmplitudes) {
    for (double kappa : {3e-6, 3e-5}) {
        auto h = synthetic::hybrid_pair(kappa, 1e-2, 6e-3);
        oracle::CMatrix om(2, 2);
        om << cplx(h.phen.omega_L, -h.phen.gamma_L), -kappa, -kappa, cplx(h.phen.omega_G, h.phen.gamma_G);
        for (int j = -20; j <= 20; ++j) {
            double wa = 0.8337175 + j * 2e-6;
            oracle::CMatrix res = oracle::inverse2(oracle::CMatrix(wa * oracle::CMatrix::Identity(2, 2) - om));
            Eigen::Vector2cd alpha = res * Eigen::Vector2cd(h.phen.g_L, h.phen.g_G);
            double loss = 2.0 * h.phen.gamma_L * std::norm(alpha(0)), gain = 2.0 * h.phen.gamma_G * std::norm(alpha(1));
            TlsRates q = tls_rates(h.raw, h.S_L, h.S_G, h.freqs, wa, 1e-9);
            PhenRates p = phen_rates(h.phen, wa);
            EXPECT_NEAR(p.gamma_loss, loss, 1e-10 * loss) << j;
            EXPECT_NEAR(p.gamma_gain, gain, 1e-10 * gain) << j;
            EXPECT_NEAR(q.gamma_loss, loss, 2e-3 * loss) << kappa << " " << j;
            EXPECT_NEAR(q.gamma_gain, gain, 2e-3 * gain) << kappa << " " << j;
        }
    }
}

TEST(PhenRates, ExceptionalPointIsDefective) {
    // equal real parts: EP at kappa = (gamma_L + gamma_G)/2
    PhenParams p{1.0, 1e-3, 1.0, 2e-4, 6e-4, 1e-5, 1e-5};
    EXPECT_EQ(kind_of([&] { phen_rates(p, 1.0); }), ErrorKind::DefectiveMatrix);
}

TEST(CompareModels, DeterministicAndZeroGainColumn) {
    synthetic::TwoMode sys;
    QnmSystem q{sys.freqs, sys.emitter.raw_couplings, sys.S_L, sys.S_G};
    PhenParams p{1.0, 1e-3, 1.0015, 4e-4, 5e-4, 1e-5, 0.5e-5};
    std::vector<double> sweep{0.999, 1.0, 1.0008, 1.002};
    auto a = compare_models(q, p, 2e-7, sweep);
    auto b = compare_models(q, p, 2e-7, sweep);
    ASSERT_EQ(a.size(), 4u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].qnm.gamma_loss, b[i].qnm.gamma_loss);
        EXPECT_EQ(a[i].phen.gamma_gain, b[i].phen.gamma_gain);
        EXPECT_EQ(a[i].n_ss_qnm, b[i].n_ss_qnm);
        EXPECT_DOUBLE_EQ(a[i].ldos_quant, 1.0 + (a[i].qnm.gamma_loss - a[i].qnm.gamma_gain) / 2e-7);
    }
    q.S_G.reset();
    p.gamma_G = 0.0;
    for (const auto& row : compare_models(q, p, 2e-7, sweep)) {
        EXPECT_EQ(row.n_ss_qnm, 0.0);
        EXPECT_EQ(row.n_ss_phen, 0.0);
    }
}

TEST(RateConsistency, SymmSetOverloadUsesSameRates) {
    synthetic::TwoMode sys;
    TlsRates a = tls_rates(sys.symm(), sys.emitter);
    EXPECT_EQ(a.gamma_loss, gamma_loss(sys.emitter.raw_couplings, sys.S_L, sys.freqs, sys.emitter.omega_a));
    EXPECT_EQ(a.gamma_gain, gamma_gain(sys.emitter.raw_couplings, sys.S_G, sys.freqs, sys.emitter.omega_a));
    EXPECT_EQ(a.gamma_B, sys.emitter.gamma_B);
}
