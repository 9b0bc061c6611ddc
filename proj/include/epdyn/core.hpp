#pragma once

// Two-level linear algebra shared by every module.
//
// Units: all rates (J, gamma, Delta, r) are in 1/us with hbar = 1, so a value
// quoted as "0.06 MHz" is used numerically as 0.06 per microsecond. Times are
// in microseconds.

#include <array>
#include <cmath>
#include <complex>

namespace epdyn {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

/// Complex 2-vector (a0, a1).
struct CVec2 {
    cplx a0{};
    cplx a1{};

    cplx& operator[](int i) { return i == 0 ? a0 : a1; }
    const cplx& operator[](int i) const { return i == 0 ? a0 : a1; }

    double norm() const { return std::sqrt(std::norm(a0) + std::norm(a1)); }

    /// Unit vector in the Hermitian norm; returns the input unchanged when its
    /// norm is below 1e-300.
    CVec2 normalized() const {
        const double n = norm();
        if (!(n > 1e-300)) return *this;
        return {a0 / n, a1 / n};
    }

    bool finite() const {
        return std::isfinite(a0.real()) && std::isfinite(a0.imag()) &&
               std::isfinite(a1.real()) && std::isfinite(a1.imag());
    }
};

inline CVec2 operator+(const CVec2& x, const CVec2& y) { return {x.a0 + y.a0, x.a1 + y.a1}; }
inline CVec2 operator-(const CVec2& x, const CVec2& y) { return {x.a0 - y.a0, x.a1 - y.a1}; }
inline CVec2 operator*(cplx s, const CVec2& x) { return {s * x.a0, s * x.a1}; }
inline CVec2 operator*(const CVec2& x, cplx s) { return s * x; }

/// Hermitian inner product <x|y> (conjugate-linear in x).
inline cplx inner(const CVec2& x, const CVec2& y) {
    return std::conj(x.a0) * y.a0 + std::conj(x.a1) * y.a1;
}

/// Complex 2x2 matrix, row-major entries.
struct CMat2 {
    cplx m00{}, m01{}, m10{}, m11{};

    static CMat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static CMat2 zero() { return {}; }
    /// Matrix whose columns are c0 and c1.
    static CMat2 from_columns(const CVec2& c0, const CVec2& c1) {
        return {c0.a0, c1.a0, c0.a1, c1.a1};
    }

    cplx trace() const { return m00 + m11; }
    cplx det() const { return m00 * m11 - m01 * m10; }
    CMat2 adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
    }
    CMat2 transpose() const { return {m00, m10, m01, m11}; }
    CMat2 conj() const { return {std::conj(m00), std::conj(m01), std::conj(m10), std::conj(m11)}; }
    /// Closed-form inverse; caller guarantees det() != 0.
    CMat2 inverse() const {
        const cplx d = det();
        return {m11 / d, -m01 / d, -m10 / d, m00 / d};
    }
    CVec2 col(int i) const { return i == 0 ? CVec2{m00, m10} : CVec2{m01, m11}; }

    /// Frobenius norm.
    double norm() const {
        return std::sqrt(std::norm(m00) + std::norm(m01) + std::norm(m10) + std::norm(m11));
    }

    bool finite() const {
        for (const cplx& z : {m00, m01, m10, m11})
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }
};

inline CMat2 operator+(const CMat2& a, const CMat2& b) {
    return {a.m00 + b.m00, a.m01 + b.m01, a.m10 + b.m10, a.m11 + b.m11};
}
inline CMat2 operator-(const CMat2& a, const CMat2& b) {
    return {a.m00 - b.m00, a.m01 - b.m01, a.m10 - b.m10, a.m11 - b.m11};
}
inline CMat2 operator*(cplx s, const CMat2& a) { return {s * a.m00, s * a.m01, s * a.m10, s * a.m11}; }
inline CMat2 operator*(const CMat2& a, cplx s) { return s * a; }
inline CMat2 operator*(const CMat2& a, const CMat2& b) {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}
inline CVec2 operator*(const CMat2& a, const CVec2& x) {
    return {a.m00 * x.a0 + a.m01 * x.a1, a.m10 * x.a0 + a.m11 * x.a1};
}

enum class Pauli { I, X, Y, Z };

CMat2 pauli(Pauli which);

/// exp(-i * M * t) by the closed-form 2x2 formula: the trace part is split off
/// and the traceless remainder B satisfies B^2 = -det(B) * I.
CMat2 mat_exp(const CMat2& m, double t);

/// Real rotation about the Bloch-sphere y axis, exp(-i * phi * sigma_y / 2).
CMat2 rotation_y(double phi);

/// Principal square root: Re >= 0, and Im >= 0 when Re == 0.
cplx principal_sqrt(cplx z);

/// Returns whichever of {w, -w} lies closer to ref.
inline cplx align_sign(cplx w, cplx ref) {
    return std::abs(w - ref) <= std::abs(w + ref) ? w : -w;
}

/// Frobenius-norm distance between two matrices.
inline double distance(const CMat2& a, const CMat2& b) { return (a - b).norm(); }

}  // namespace epdyn
