#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include "epdyn/core.hpp"

namespace oracle {

using epdyn::cplx;
using epdyn::CMat2;
using epdyn::CVec2;

/// exp(A) by scaling and squaring of a Taylor series.
inline CMat2 expm_series(const CMat2& a, int terms = 30) {
    int squarings = 0;
    double n = a.norm();
    while (n > 0.5) {
        n /= 2;
        ++squarings;
    }
    const CMat2 x = a * cplx(std::ldexp(1.0, -squarings));
    CMat2 term = CMat2::identity();
    CMat2 sum = CMat2::identity();
    for (int k = 1; k < terms; ++k) {
        term = term * x * cplx(1.0 / k);
        sum = sum + term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

/// Eigenvalues from the characteristic polynomial, no shared code paths.
inline std::pair<cplx, cplx> eigenvalues(const CMat2& m) {
    const cplx tr = m.m00 + m.m11;
    const cplx det = m.m00 * m.m11 - m.m01 * m.m10;
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

inline CMat2 random_matrix(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    return {cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)),
            cplx(g(rng), g(rng))};
}

inline CVec2 random_vector(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return {cplx(g(rng), g(rng)), cplx(g(rng), g(rng))};
}

inline double max_abs_diff(const CMat2& a, const CMat2& b) {
    return std::max({std::abs(a.m00 - b.m00), std::abs(a.m01 - b.m01), std::abs(a.m10 - b.m10),
                     std::abs(a.m11 - b.m11)});
}

}  // namespace oracle
