#include "epdyn/core.hpp"
#include "epdyn/error.hpp"

namespace epdyn {

CMat2 pauli(Pauli which) {
    switch (which) {
        case Pauli::I: return {1.0, 0.0, 0.0, 1.0};
        case Pauli::X: return {0.0, 1.0, 1.0, 0.0};
        case Pauli::Y: return {0.0, -kI, kI, 0.0};
        case Pauli::Z: return {1.0, 0.0, 0.0, -1.0};
    }
    return CMat2::identity();
}

CMat2 mat_exp(const CMat2& m, double t) {
    // A = -i M t = tau * I + B with B traceless.
    const CMat2 a = (-kI * t) * m;
    const cplx tau = 0.5 * a.trace();
    const CMat2 b = a - tau * CMat2::identity();
    const cplx q = -b.det();  // B^2 = q I
    const cplx delta = std::sqrt(q);

    cplx cosh_d, sinhc_d;  // cosh(delta), sinh(delta) / delta
    if (std::abs(delta) < 1e-4) {
        const cplx q2 = q * q;
        cosh_d = 1.0 + q / 2.0 + q2 / 24.0 + q2 * q / 720.0;
        sinhc_d = 1.0 + q / 6.0 + q2 / 120.0 + q2 * q / 5040.0;
    } else {
        cosh_d = std::cosh(delta);
        sinhc_d = std::sinh(delta) / delta;
    }
    return std::exp(tau) * (cosh_d * CMat2::identity() + sinhc_d * b);
}

CMat2 rotation_y(double phi) {
    const double c = std::cos(phi / 2), s = std::sin(phi / 2);
    return {c, -s, s, c};
}

cplx principal_sqrt(cplx z) {
    cplx w = std::sqrt(z);
    if (w.real() == 0.0 && w.imag() < 0.0) w = -w;
    if (w.real() < 0.0) w = -w;
    return w;
}

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::Validation: return "Validation";
        case ErrorCode::MissingCustomMatrix: return "MissingCustomMatrix";
        case ErrorCode::DegenerateAtEP: return "DegenerateAtEP";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::StepSizeUnderflow: return "StepSizeUnderflow";
        case ErrorCode::DecayUnderflow: return "DecayUnderflow";
        case ErrorCode::IllConditionedBasis: return "IllConditionedBasis";
        case ErrorCode::EPSingularity: return "EPSingularity";
        case ErrorCode::BlowUp: return "BlowUp";
        case ErrorCode::LoopThroughEP: return "LoopThroughEP";
        case ErrorCode::GapCollapse: return "GapCollapse";
        case ErrorCode::EffectiveGapCollapse: return "EffectiveGapCollapse";
        case ErrorCode::RefinementLimit: return "RefinementLimit";
        case ErrorCode::EPOnPath: return "EPOnPath";
        case ErrorCode::AmbiguousEndpoint: return "AmbiguousEndpoint";
        case ErrorCode::UnsupportedFamily: return "UnsupportedFamily";
    }
    return "Unknown";
}

}  // namespace epdyn
