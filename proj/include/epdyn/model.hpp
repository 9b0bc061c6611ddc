#pragma once

// Hamiltonian families for an encircled exceptional point (EP) and their
// closed-form spectra.
//
//   PT_TRACELESS  [[D/2 + i g,  J], [J, -D/2 - i g]]
//   PT_PASSIVE    PT_TRACELESS - i g I   (loss-only realization)
//   APT_PASSIVE   Ry(pi/2) PT_PASSIVE Ry(-pi/2)
//                 = [[-J - i g, D/2 + i g], [D/2 + i g, J - i g]]
//   APT_PSEUDO    APT_PASSIVE + i g I    (sigma_z pseudo-Hermitian on D = 0)
//   CUSTOM        any constant 2x2 matrix
//
// All four parametric families share lambda^2 = (D/2 + i g)^2 + J^2, with EPs at
// (D, J) = (0, +-g).

#include <optional>
#include <string>
#include <utility>

#include "epdyn/core.hpp"

namespace epdyn {

enum class Family { PT_TRACELESS, PT_PASSIVE, APT_PASSIVE, APT_PSEUDO, CUSTOM };

const char* to_string(Family f);
Family family_from_string(const std::string& s);

struct HamiltonianSpec {
    Family family = Family::PT_PASSIVE;
    double gamma = 0.06;  ///< dissipation rate, 1/us
    std::optional<CMat2> custom_matrix;
};

inline bool is_parametric_family(Family f) { return f != Family::CUSTOM; }
inline bool is_apt(Family f) { return f == Family::APT_PASSIVE || f == Family::APT_PSEUDO; }
inline bool is_passive(Family f) { return f == Family::PT_PASSIVE || f == Family::APT_PASSIVE; }

/// Symmetric phase, broken phase, or at the EP. For the APT families the
/// symmetric phase is the one with an imaginary traceless spectrum.
enum class Regime { PTS, PTB, EP };

const char* to_string(Regime r);

/// Eigen-decomposition at one parameter point.
///
/// The "+" pair is the branch alpha and "-" is beta. For parametric families
/// lambda_plus = shift + root and lambda_minus = shift - root, where root is
/// the principal square root of lambda^2 and shift is -i g for passive
/// families (0 otherwise). Vectors use the half-angle gauge
/// v_plus = (cos(th/2), sin(th/2)), v_minus = (-sin(th/2), cos(th/2)) with
/// 2 sin(th/2) cos(th/2) = J / root; the APT families rotate both by Ry(pi/2).
/// These vectors are not unit-normalized.
struct EigenPair {
    cplx lambda_plus{};
    cplx lambda_minus{};
    CVec2 v_plus{};
    CVec2 v_minus{};
    Regime regime = Regime::EP;
    cplx gap{};   ///< lambda_plus - lambda_minus
    cplx root{};  ///< traceless branch value (gap / 2)
};

struct EigenOptions {
    double ep_tolerance = 1e-9;  ///< |gap| below this counts as the EP, 1/us
    bool want_vectors = true;
};

/// H(D, J) for the given family. Throws MissingCustomMatrix for CUSTOM
/// without a matrix.
CMat2 build(const HamiltonianSpec& spec, double delta, double j);

/// Throws DegenerateAtEP when |gap| < ep_tolerance and vectors are requested;
/// pass want_vectors = false to read eigenvalues at the EP.
EigenPair eigensystem(const HamiltonianSpec& spec, double delta, double j,
                      const EigenOptions& opts = {});

/// Ry(pi/2) H Ry(-pi/2).
CMat2 apt_from_pt(const CMat2& pt_passive);

/// lambda^2 = (D/2 + i g)^2 + J^2 shared by all parametric families.
inline cplx root_squared(double gamma, double delta, double j) {
    const cplx a{delta / 2, gamma};
    return a * a + j * j;
}

/// -i g for passive families, 0 for traceless ones.
cplx trace_shift(const HamiltonianSpec& spec);

/// Eigenvectors (alpha, beta) on an explicit branch: alpha belongs to the
/// traceless eigenvalue +root. `root` may be either square root of
/// lambda^2, which is how callers continue the branch along a path.
std::pair<CVec2, CVec2> branch_vectors(const HamiltonianSpec& spec, double delta, double j,
                                       cplx root);

/// Half-angle pair (c, s) for the PT gauge on the given branch:
/// c^2 = (root + a)/(2 root), s^2 = (root - a)/(2 root), 2 s c = J / root,
/// a = D/2 + i g.
std::pair<cplx, cplx> half_angles(double gamma, double delta, double j, cplx root);

/// Continuously tracked traceless branch and its half-angle gauge. alpha is
/// (c, s) and beta is (-s, c) before any APT rotation.
struct Branch {
    cplx root{};
    cplx c{};
    cplx s{};
};

/// Branch at a starting point: principal root, gauge from half_angles.
Branch start_branch(double gamma, double delta, double j);

/// Continue `prev` to a nearby point: the root sign closest to prev.root and
/// the overall vector sign closest to the previous (c, s).
Branch continue_branch(double gamma, double delta, double j, const Branch& prev);

/// (alpha, beta) for a tracked branch, rotated for APT families.
std::pair<CVec2, CVec2> branch_vectors(const HamiltonianSpec& spec, const Branch& b);

/// Label the regime of a parametric family from its traceless branch value.
Regime classify_regime(Family family, cplx root, double ep_tolerance);

}  // namespace epdyn
