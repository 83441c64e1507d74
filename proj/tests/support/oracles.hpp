#pragma once

// Independent reference computations used by the tests. Nothing here calls into the library's
// own linear-algebra helpers, so a bug there cannot cancel out.

#include <array>
#include <complex>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace oracle {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

// Roots of x^2 - t x + d = 0 (eigenvalues of a 2x2 matrix with trace t, determinant d).
inline std::array<cplx, 2> quadratic_roots(cplx t, cplx d) {
    cplx r = std::sqrt(t * t - 4.0 * d);
    return {0.5 * (t + r), 0.5 * (t - r)};
}

inline std::array<cplx, 2> eig2(const CMatrix& m) {
    return quadratic_roots(m(0, 0) + m(1, 1), m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
}

// Ascending eigenvalues of a 2x2 Hermitian matrix [[a, b], [b*, c]].
inline std::array<double, 2> hermitian_eig2(const CMatrix& m) {
    double a = m(0, 0).real(), c = m(1, 1).real();
    double r = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(m(0, 1)));
    return {0.5 * (a + c) - r, 0.5 * (a + c) + r};
}

inline CMatrix inverse2(const CMatrix& m) {
    cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    CMatrix r(2, 2);
    r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return r / det;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
    cplx cnormal() { return {normal(), normal()}; }

    CMatrix cmatrix(Eigen::Index r, Eigen::Index c) {
        CMatrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cnormal();
        return m;
    }

    // Hermitian positive definite with eigenvalues >= floor.
    CMatrix hpd(Eigen::Index n, double floor = 0.1) {
        CMatrix a = cmatrix(n, n);
        return a * a.adjoint() + floor * CMatrix::Identity(n, n);
    }

private:
    std::mt19937_64 gen_;
};

// S_{mu eta} = sqrt(w_mu w_eta) I_{mu eta} / (i (wt_mu - conj(wt_eta))), with wt = omega - i gamma.
inline CMatrix pole_s(const CMatrix& I, const std::vector<double>& omega, const std::vector<double>& gamma) {
    const auto n = I.rows();
    CMatrix s(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            cplx wa(omega[a], -gamma[a]), wb(omega[b], -gamma[b]);
            s(a, b) = std::sqrt(omega[a] * omega[b]) * I(a, b) / (cplx(0.0, 1.0) * (wa - std::conj(wb)));
        }
    return s;
}

struct GapPoint {
    double d_gap_nm = 0.0;
    CMatrix S_L, S_G;
};

// Loads the gap-sweep matrix fixture. Off-diagonals: the entry named in "authoritative" is used and its
// partner is set to the complex conjugate (two printed pairs are inconsistent with Hermiticity).
inline std::vector<GapPoint> load_gap_matrices(const std::string& path) {
    std::ifstream in(path);
    nlohmann::json j = nlohmann::json::parse(in);
    auto c = [](const nlohmann::json& v) { return cplx(v[0].get<double>(), v[1].get<double>()); };
    auto build = [&](const nlohmann::json& m, const std::string& auth) {
        CMatrix s(2, 2);
        s(0, 0) = c(m["pp"]).real();
        s(1, 1) = c(m["mm"]).real();
        cplx off = c(m[auth]);
        if (auth == "pm") {
            s(0, 1) = off;
            s(1, 0) = std::conj(off);
        } else {
            s(1, 0) = off;
            s(0, 1) = std::conj(off);
        }
        return s;
    };
    std::vector<GapPoint> out;
    for (const auto& p : j["points"]) {
        GapPoint t;
        t.d_gap_nm = p["d_gap_nm"].get<double>();
        t.S_L = build(p["S_L"], j["authoritative"]["S_L"].get<std::string>());
        t.S_G = build(p["S_G"], j["authoritative"]["S_G"].get<std::string>());
        out.push_back(t);
    }
    return out;
}

inline std::string fixture(const std::string& name) { return std::string(QNMQ_FIXTURE_DIR) + "/" + name; }

}  // namespace oracle
