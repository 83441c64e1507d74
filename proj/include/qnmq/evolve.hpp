#pragma once

#include <functional>

#include <Eigen/SparseLU>
#include <boost/numeric/odeint.hpp>

#include "lindblad.hpp"

namespace qnmq {

struct StateCheck {
    double trace_drift = 0.0;  // |tr rho - 1|
    double herm_drift = 0.0;   // max |rho - rho^dag|
    double min_eig = 0.0;
};

inline StateCheck check_state(const CMatrix& rho) {
    StateCheck c;
    c.trace_drift = std::abs(rho.trace() - 1.0);
    c.herm_drift = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<CMatrix> es((rho + rho.adjoint()) * 0.5, Eigen::EigenvaluesOnly);
    c.min_eig = es.eigenvalues()(0);
    return c;
}

inline void validate_density_matrix(const CMatrix& rho, Eigen::Index dim) {
    if (rho.rows() != dim || rho.cols() != dim)
        throw Error(ErrorKind::DimensionMismatch, "density matrix has wrong dimension");
    StateCheck c = check_state(rho);
    if (c.herm_drift > 1e-9) throw Error(ErrorKind::ValidationError, "density matrix not Hermitian");
    if (c.trace_drift > 1e-9) throw Error(ErrorKind::ValidationError, "density matrix trace differs from 1");
    if (c.min_eig < -1e-8) throw Error(ErrorKind::ValidationError, "density matrix has negative eigenvalue");
}

// Pure product state |n_0 ... n_{M-1}> (x) |tls>.
inline CMatrix product_state(const HilbertSpec& spec, const std::vector<int>& photons, int tls) {
    const auto d = static_cast<Eigen::Index>(spec.dimension());
    CMatrix rho = CMatrix::Zero(d, d);
    Eigen::Index i = fock::basis_index(spec, photons, tls);
    rho(i, i) = 1.0;
    return rho;
}

inline LindbladModel with_rotating_frame(LindbladModel m, double omega_ref) {
    m.frame = omega_ref;
    return m;
}

struct Observables {
    double t = 0.0;
    double n_e = 0.0;           // <s+ s->
    cplx sigma_minus{0.0, 0.0};  // <s-> in the model's frame
    std::vector<double> photons;  // <a_k^dag a_k>
    StateCheck check;
};

inline Observables measure(const Operators& ops, const CMatrix& rho, double t) {
    Observables o;
    o.t = t;
    if (ops.sm.size() > 0) {
        SpMat sp = ops.sm.adjoint();
        o.n_e = (SpMat(sp * ops.sm) * rho).trace().real();
        o.sigma_minus = (ops.sm * rho).trace();
    }
    for (const auto& a : ops.a) o.photons.push_back((SpMat(SpMat(a.adjoint()) * a) * rho).trace().real());
    o.check = check_state(rho);
    return o;
}

struct EvolveOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    std::size_t samples = 101;        // checkpoints including t = 0 and t_end (at least 2)
    bool keep_states = false;
    std::size_t max_steps = 5000000;  // between consecutive checkpoints
    double positivity_fail = -1e-5;
};

struct Trajectory {
    std::vector<Observables> samples;
    std::vector<CMatrix> states;
    CMatrix final_state;
    double worst_trace_drift = 0.0;
    double worst_herm_drift = 0.0;
    double worst_min_eig = 0.0;
};

namespace detail {

using ode_state = std::vector<cplx>;

struct OdeSystem {
    const GeneratorOps* g;
    void operator()(const ode_state& x, ode_state& dxdt, double) const {
        Eigen::Map<const CMatrix> rho(x.data(), g->dim, g->dim);
        Eigen::Map<CMatrix> out(dxdt.data(), g->dim, g->dim);
        out = lindblad_rhs(*g, CMatrix(rho));
    }
};

inline double initial_step(const GeneratorOps& g) {
    double scale = 0.0;
    for (Eigen::Index k = 0; k < g.H_eff.outerSize(); ++k)
        for (SpMat::InnerIterator it(g.H_eff, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    for (const auto& K : g.K)
        for (Eigen::Index k = 0; k < K.outerSize(); ++k)
            for (SpMat::InnerIterator it(K, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    return scale > 0.0 ? 1e-3 / scale : 1.0;
}

// Integrates x over the given (increasing) times, invoking obs(x, t) at each.
inline void integrate_checkpoints(const GeneratorOps& g, ode_state& x, const std::vector<double>& times,
                                  double rtol, double atol, std::size_t max_steps,
                                  const std::function<void(const ode_state&, double)>& obs) {
    namespace ode = boost::numeric::odeint;
    OdeSystem sys{&g};
    auto stepper = ode::make_dense_output(atol, rtol, ode::runge_kutta_dopri5<ode_state>());
    try {
        ode::integrate_times(stepper, sys, x, times.begin(), times.end(), initial_step(g),
                             [&](const ode_state& s, double t) { obs(s, t); }, ode::max_step_checker(max_steps));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorKind::StepUnderflow, std::string("integrator failed: ") + e.what());
    }
}

}  // namespace detail

inline Trajectory evolve(const GeneratorOps& g, const Operators& ops, const CMatrix& rho0, double t_end,
                         const EvolveOptions& opt = {}) {
    validate_density_matrix(rho0, g.dim);
    if (!(t_end >= 0.0)) throw Error(ErrorKind::ValidationError, "t_end must be >= 0");
    Trajectory tr;
    auto record = [&](const CMatrix& rho, double t) {
        Observables o = measure(ops, rho, t);
        tr.worst_trace_drift = std::max(tr.worst_trace_drift, o.check.trace_drift);
        tr.worst_herm_drift = std::max(tr.worst_herm_drift, o.check.herm_drift);
        tr.worst_min_eig = std::min(tr.worst_min_eig, o.check.min_eig);
        if (o.check.min_eig < opt.positivity_fail)
            throw Error(ErrorKind::NonPhysicalState,
                        "density matrix eigenvalue " + std::to_string(o.check.min_eig) + " at t = " + std::to_string(t));
        tr.samples.push_back(std::move(o));
        if (opt.keep_states) tr.states.push_back(rho);
        tr.final_state = rho;
    };
    if (t_end == 0.0) {
        record(rho0, 0.0);
        return tr;
    }
    std::vector<double> times;
    const std::size_t n = std::max<std::size_t>(opt.samples, 2);
    for (std::size_t i = 0; i < n; ++i) times.push_back(t_end * static_cast<double>(i) / static_cast<double>(n - 1));
    times.back() = t_end;
    detail::ode_state x(rho0.data(), rho0.data() + rho0.size());
    detail::integrate_checkpoints(g, x, times, opt.rtol, opt.atol, opt.max_steps,
                                  [&](const detail::ode_state& s, double t) {
                                      record(Eigen::Map<const CMatrix>(s.data(), g.dim, g.dim), t);
                                  });
    return tr;
}

inline Trajectory evolve(const LindbladModel& m, const CMatrix& rho0, double t_end, const EvolveOptions& opt = {}) {
    GeneratorOps g = make_generator(m);
    Operators ops = make_operators(m.spec, m.charge);
    return evolve(g, ops, rho0, t_end, opt);
}

enum class SteadyMethod { automatic, null_space, long_time };

struct SteadyOptions {
    SteadyMethod method = SteadyMethod::automatic;
    std::size_t null_space_max_dim = 1024;
    double residual_tol = 1e-10;   // null_space acceptance, relative
    double long_time_tol = 1e-12;  // ||drho/dt||_1 < tol ||rho||_1
    double rtol = 1e-9;
    double atol = 1e-12;
    std::size_t max_chunks = 400;
};

struct SteadyResult {
    CMatrix rho;
    SteadyMethod method = SteadyMethod::null_space;
    double residual = 0.0;
};

namespace detail {

inline double max_abs(const SpMat& m) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (SpMat::InnerIterator it(m, k); it; ++it) s = std::max(s, std::abs(it.value()));
    return s;
}

inline CMatrix finish_state(CMatrix rho) {
    rho = (rho + rho.adjoint()) * 0.5;
    cplx tr = rho.trace();
    if (std::abs(tr) == 0.0) throw Error(ErrorKind::NoConvergence, "steady state has zero trace");
    return rho / tr.real();
}

// Solves L x = 0 with tr(x) = 1. When the generator conserves N the stationary state is block diagonal in N,
// so only entries rho_ij with N_i = N_j are kept.
inline SteadyResult steady_null_space(const GeneratorOps& g, const SteadyOptions& opt) {
    const Eigen::Index d = g.dim;
    std::vector<Eigen::Index> keep_of(static_cast<std::size_t>(d * d), -1);
    std::vector<Eigen::Index> full_of;
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index i = 0; i < d; ++i)
            if (!g.conserves_number || std::abs(g.number_diag(i) - g.number_diag(j)) < 0.5) {
                keep_of[static_cast<std::size_t>(i + j * d)] = static_cast<Eigen::Index>(full_of.size());
                full_of.push_back(i + j * d);
            }
    const auto n = static_cast<Eigen::Index>(full_of.size());
    SpMat L = liouvillian(g, keep_of, n);
    double scale = max_abs(L);
    if (scale == 0.0) throw Error(ErrorKind::NoConvergence, "zero generator has no unique steady state");
    L /= scale;

    // row 0 (the rho_00 equation) is replaced by the trace constraint
    std::vector<Eigen::Triplet<cplx>> t;
    t.reserve(static_cast<std::size_t>(L.nonZeros() + d));
    for (Eigen::Index k = 0; k < L.outerSize(); ++k)
        for (SpMat::InnerIterator it(L, k); it; ++it)
            if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index i = 0; i < d; ++i) t.emplace_back(0, keep_of[static_cast<std::size_t>(i + i * d)], 1.0);
    SpMat A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "Liouvillian factorization failed");
    CVector b = CVector::Zero(n);
    b(0) = 1.0;
    CVector x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite())
        throw Error(ErrorKind::NoConvergence, "Liouvillian solve failed");

    SteadyResult r;
    r.method = SteadyMethod::null_space;
    r.residual = (L * x).norm() / x.norm();
    if (!(r.residual < opt.residual_tol))
        throw Error(ErrorKind::NoConvergence, "steady-state residual " + std::to_string(r.residual));
    CMatrix rho = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index v = full_of[static_cast<std::size_t>(k)];
        rho(v % d, v / d) = x(k);
    }
    r.rho = finish_state(rho);
    return r;
}

inline double l1(const CMatrix& m) { return m.cwiseAbs().sum(); }

// Slowest linear relaxation rate; sets the long-time chunk length.
inline double slowest_rate(const LindbladModel& m) {
    double slow = std::numeric_limits<double>::infinity();
    for (const auto& c : m.channels)
        if (c.kind == JumpKind::tls_lower) slow = std::min(slow, 2.0 * c.rate(0, 0).real());
    if (m.spec.mode_count > 0) {
        Eigen::ComplexEigenSolver<CMatrix> es(mode_drift(m), false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            slow = std::min(slow, -es.eigenvalues()(i).real());
    }
    return std::isfinite(slow) && slow > 0.0 ? slow : 1.0;
}

inline SteadyResult steady_long_time(const LindbladModel& m, const GeneratorOps& g, const SteadyOptions& opt) {
    std::vector<int> vac(static_cast<std::size_t>(m.spec.mode_count), 0);
    CMatrix rho = product_state(m.spec, vac, 0);
    const double chunk = 2.0 / slowest_rate(m);
    double t = 0.0;
    for (std::size_t c = 0; c < opt.max_chunks; ++c) {
        double res = l1(lindblad_rhs(g, rho)) / l1(rho);
        if (res < opt.long_time_tol) {
            SteadyResult r;
            r.method = SteadyMethod::long_time;
            r.residual = res;
            r.rho = finish_state(rho);
            return r;
        }
        ode_state x(rho.data(), rho.data() + rho.size());
        std::vector<double> times{t, t + chunk};
        integrate_checkpoints(g, x, times, opt.rtol, opt.atol, 5000000, [](const ode_state&, double) {});
        rho = Eigen::Map<CMatrix>(x.data(), g.dim, g.dim);
        t += chunk;
    }
    throw Error(ErrorKind::NoConvergence, "long-time integration did not reach the stationarity tolerance");
}

}  // namespace detail

inline SteadyResult steady_state(const LindbladModel& m, const SteadyOptions& opt = {}) {
    require_below_threshold(m);
    GeneratorOps g = make_generator(m);
    SteadyMethod method = opt.method;
    if (method == SteadyMethod::automatic)
        method = static_cast<std::size_t>(g.dim) <= opt.null_space_max_dim ? SteadyMethod::null_space
                                                                           : SteadyMethod::long_time;
    return method == SteadyMethod::null_space ? detail::steady_null_space(g, opt)
                                              : detail::steady_long_time(m, g, opt);
}

}  // namespace qnmq
