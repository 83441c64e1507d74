#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qnmq {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr cplx I1{0.0, 1.0};

enum class ErrorKind {
    DegenerateHybrid,
    PoleHit,
    NonPositiveBackground,
    RegionMismatch,
    ParseError,
    ValidationError,
    NotPositiveDefinite,
    NotHermitian,
    SingularSPrime,
    DimensionMismatch,
    UnifiedInvalid,
    AboveThreshold,
    DimensionBudget,
    StepUnderflow,
    NonPhysicalState,
    NoConvergence,
    ConventionViolation,
    DefectiveMatrix,
    ConfigError,
};

inline const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::DegenerateHybrid: return "DegenerateHybrid";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::NonPositiveBackground: return "NonPositiveBackground";
    case ErrorKind::RegionMismatch: return "RegionMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::SingularSPrime: return "SingularSPrime";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnifiedInvalid: return "UnifiedInvalid";
    case ErrorKind::AboveThreshold: return "AboveThreshold";
    case ErrorKind::DimensionBudget: return "DimensionBudget";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NonPhysicalState: return "NonPhysicalState";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ConventionViolation: return "ConventionViolation";
    case ErrorKind::DefectiveMatrix: return "DefectiveMatrix";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Complex eigenfrequency w~ = omega - i*gamma, energies in eV.
struct ComplexFreq {
    double omega = 0.0;
    double gamma = 0.0;

    ComplexFreq() = default;
    ComplexFreq(double w, double g) : omega(w), gamma(g) {}

    static ComplexFreq from_complex(cplx w) { return {w.real(), -w.imag()}; }
    cplx value() const { return {omega, -gamma}; }
    double quality() const { return omega / (2.0 * gamma); }

    bool operator==(const ComplexFreq&) const = default;
};

// Quantum-model constructors only accept decaying modes with positive frequency.
inline void require_quantum_mode(const ComplexFreq& w, const std::string& who) {
    if (!(w.omega > 0.0))
        throw Error(ErrorKind::ValidationError, who + ": mode frequency must be > 0");
    if (!(w.gamma > 0.0))
        throw Error(ErrorKind::ValidationError,
                    who + ": mode half-width gamma must be > 0 (linear amplification regime)");
}

inline void require_quantum_modes(const std::vector<ComplexFreq>& ws, const std::string& who) {
    for (const auto& w : ws) require_quantum_mode(w, who);
}

inline void require_square(const CMatrix& m, Eigen::Index n, const std::string& who) {
    if (m.rows() != n || m.cols() != n)
        throw Error(ErrorKind::DimensionMismatch,
                    who + ": expected " + std::to_string(n) + "x" + std::to_string(n) + " matrix, got " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

struct EmitterParams {
    double omega_a = 0.0;
    double gamma_B = 0.0;
    CVector raw_couplings;
    std::string position_label;

    void validate() const {
        if (!(omega_a > 0.0)) throw Error(ErrorKind::ValidationError, "emitter omega_a must be > 0");
        if (!(gamma_B > 0.0)) throw Error(ErrorKind::ValidationError, "emitter gamma_B must be > 0");
    }
};

}  // namespace qnmq
