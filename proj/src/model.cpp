#include "epdyn/model.hpp"

#include <string>
#include <tuple>

#include "epdyn/error.hpp"

namespace epdyn {

const char* to_string(Family f) {
    switch (f) {
        case Family::PT_TRACELESS: return "PT_TRACELESS";
        case Family::PT_PASSIVE: return "PT_PASSIVE";
        case Family::APT_PASSIVE: return "APT_PASSIVE";
        case Family::APT_PSEUDO: return "APT_PSEUDO";
        case Family::CUSTOM: return "CUSTOM";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    for (Family f : {Family::PT_TRACELESS, Family::PT_PASSIVE, Family::APT_PASSIVE,
                     Family::APT_PSEUDO, Family::CUSTOM})
        if (s == to_string(f)) return f;
    throw Error(ErrorCode::Validation, "unknown Hamiltonian family '" + s + "'",
                "hamiltonian.family");
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::PTS: return "PTS";
        case Regime::PTB: return "PTB";
        case Regime::EP: return "EP";
    }
    return "?";
}

cplx trace_shift(const HamiltonianSpec& spec) {
    return is_passive(spec.family) ? cplx{0.0, -spec.gamma} : cplx{};
}

CMat2 build(const HamiltonianSpec& spec, double delta, double j) {
    const double g = spec.gamma;
    const cplx a{delta / 2, g};
    switch (spec.family) {
        case Family::PT_TRACELESS: return {a, j, j, -a};
        case Family::PT_PASSIVE: return {delta / 2, j, j, cplx{-delta / 2, -2 * g}};
        case Family::APT_PASSIVE: return {cplx{-j, -g}, a, a, cplx{j, -g}};
        case Family::APT_PSEUDO: return {-j, a, a, j};
        case Family::CUSTOM:
            if (!spec.custom_matrix)
                throw Error(ErrorCode::MissingCustomMatrix,
                            "CUSTOM family requires a custom matrix",
                            "hamiltonian.custom_matrix");
            return *spec.custom_matrix;
    }
    return {};
}

CMat2 apt_from_pt(const CMat2& pt_passive) {
    return rotation_y(kPi / 2) * pt_passive * rotation_y(-kPi / 2);
}

std::pair<cplx, cplx> half_angles(double gamma, double delta, double j, cplx root) {
    const cplx a{delta / 2, gamma};
    cplx c = std::sqrt((root + a) / (2.0 * root));
    cplx s = std::sqrt((root - a) / (2.0 * root));
    const cplx target = j / root;
    if (std::abs(2.0 * s * c - target) > std::abs(-2.0 * s * c - target)) s = -s;
    return {c, s};
}

Branch start_branch(double gamma, double delta, double j) {
    Branch b;
    b.root = principal_sqrt(root_squared(gamma, delta, j));
    std::tie(b.c, b.s) = half_angles(gamma, delta, j, b.root);
    return b;
}

Branch continue_branch(double gamma, double delta, double j, const Branch& prev) {
    Branch b;
    b.root = align_sign(principal_sqrt(root_squared(gamma, delta, j)), prev.root);
    std::tie(b.c, b.s) = half_angles(gamma, delta, j, b.root);
    const double keep = std::norm(b.c - prev.c) + std::norm(b.s - prev.s);
    const double flip = std::norm(b.c + prev.c) + std::norm(b.s + prev.s);
    if (flip < keep) {
        b.c = -b.c;
        b.s = -b.s;
    }
    return b;
}

std::pair<CVec2, CVec2> branch_vectors(const HamiltonianSpec& spec, double delta, double j,
                                       cplx root) {
    Branch b;
    b.root = root;
    std::tie(b.c, b.s) = half_angles(spec.gamma, delta, j, root);
    return branch_vectors(spec, b);
}

std::pair<CVec2, CVec2> branch_vectors(const HamiltonianSpec& spec, const Branch& b) {
    CVec2 alpha{b.c, b.s};
    CVec2 beta{-b.s, b.c};
    if (is_apt(spec.family)) {
        const CMat2 r = rotation_y(kPi / 2);
        alpha = r * alpha;
        beta = r * beta;
    }
    return {alpha, beta};
}

Regime classify_regime(Family family, cplx root, double ep_tolerance) {
    if (2.0 * std::abs(root) < ep_tolerance) return Regime::EP;
    // Off the D = 0 axis this is a heuristic: whichever part dominates.
    const bool real_dominated = std::abs(root.imag()) < std::abs(root.real());
    if (is_apt(family)) return real_dominated ? Regime::PTB : Regime::PTS;
    return real_dominated ? Regime::PTS : Regime::PTB;
}

namespace {

CVec2 generic_eigenvector(const CMat2& m, cplx mu) {
    const CVec2 u{m.m01, mu - m.m00};
    const CVec2 w{mu - m.m11, m.m10};
    return u.norm() >= w.norm() ? u : w;
}

EigenPair custom_eigensystem(const CMat2& m, const EigenOptions& opts) {
    EigenPair out;
    const cplx half_trace = 0.5 * m.trace();
    const CMat2 b = m - half_trace * CMat2::identity();
    out.root = principal_sqrt(-b.det());
    out.lambda_plus = half_trace + out.root;
    out.lambda_minus = half_trace - out.root;
    out.gap = 2.0 * out.root;
    if (std::abs(out.gap) < opts.ep_tolerance) {
        out.regime = Regime::EP;
    } else {
        out.regime = std::abs(out.gap.imag()) < std::abs(out.gap.real()) ? Regime::PTS : Regime::PTB;
    }
    if (!opts.want_vectors) return out;
    if (out.regime == Regime::EP) {
        if (b.norm() < opts.ep_tolerance) {  // scalar matrix: any basis works
            out.v_plus = {1.0, 0.0};
            out.v_minus = {0.0, 1.0};
            return out;
        }
        throw Error(ErrorCode::DegenerateAtEP, "eigenvectors coalesce at the EP", {},
                    std::abs(out.gap));
    }
    out.v_plus = generic_eigenvector(m, out.lambda_plus);
    out.v_minus = generic_eigenvector(m, out.lambda_minus);
    return out;
}

}  // namespace

EigenPair eigensystem(const HamiltonianSpec& spec, double delta, double j,
                      const EigenOptions& opts) {
    if (spec.family == Family::CUSTOM) return custom_eigensystem(build(spec, delta, j), opts);

    EigenPair out;
    out.root = principal_sqrt(root_squared(spec.gamma, delta, j));
    const cplx shift = trace_shift(spec);
    out.lambda_plus = shift + out.root;
    out.lambda_minus = shift - out.root;
    out.gap = 2.0 * out.root;
    out.regime = classify_regime(spec.family, out.root, opts.ep_tolerance);
    if (!opts.want_vectors) return out;
    if (out.regime == Regime::EP)
        throw Error(ErrorCode::DegenerateAtEP, "eigenvectors coalesce at the EP", {},
                    std::abs(out.gap));
    std::tie(out.v_plus, out.v_minus) = branch_vectors(spec, delta, j, out.root);
    return out;
}

}  // namespace epdyn
