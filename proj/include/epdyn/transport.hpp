#pragma once

// Parallel-transported frame. With the complex rotation
//
//   T = [[cos(th/2), -sin(th/2)], [sin(th/2), cos(th/2)]],  tan th = J / (D/2 + i g),
//
// psi = T psi' turns i d/dt psi = H psi into i d/dt psi' = h~ psi' with
//
//   h~ = shift I + [[-lambda, f], [-f, lambda]],
//   f  = [J (D'/2) - J' (D/2 + i g)] / (2 i lambda^2).
//
// Here lambda is the frame root, the negative of the continuously tracked
// alpha root, and shift is the family's scalar part (-i g when passive). The
// transformation is exact; the only approximation is the ODE solver.
//
// The relative amplitudes R1 = C2 / C1 and R2 = C1 / C2 obey the Riccati
// equations
//
//   R1' = -2 i lambda R1 + i f (1 + R1^2)
//   R2' = +2 i lambda R2 - i f (1 + R2^2)
//
// For the APT families they are written with
// f' = [J' (i g + D/2) - J (D'/2)] / (2 i lambda^2):
//
//   R1' = -2 i lambda R1 - i f' (1 + R1^2)
//   R2' = +2 i lambda R2 + i f' (1 + R2^2)

#include <iosfwd>
#include <string>
#include <vector>

#include "epdyn/core.hpp"
#include "epdyn/evolve.hpp"
#include "epdyn/loop.hpp"
#include "epdyn/model.hpp"

namespace epdyn {

struct TransportFrame {
    double t = 0;
    cplx theta_c{};   ///< complex mixing angle, e^{i th/2} = cos + i sin
    CMat2 T_mat;      ///< PT-gauge rotation; APT frames are Ry(pi/2) T_mat
    cplx f{};         ///< nonadiabatic coupling, 1/us
    cplx lambda{};    ///< frame root entering h_tilde
    CMat2 h_tilde;
    cplx e_plus{}, e_minus{};  ///< eigenvalues of h_tilde, continuity tracked
    cplx eff_root{};  ///< (e_plus - e_minus) / 2 = sqrt(lambda^2 - f^2)
};

/// Sequential frame evaluation along a loop from t = 0. Branches (root, half
/// angles and the effective root) are continued in steps of at most
/// period / 4096.
class FrameTracker {
public:
    FrameTracker(const HamiltonianSpec& hspec, const LoopSpec& lspec, double ep_tolerance = 1e-9);

    /// Frame at t >= the last requested time. `segment` selects the noise
    /// level on a jump (negative means segment_of(t)).
    TransportFrame at(double t, int segment = -1);

private:
    TransportFrame assemble(double t, int segment) const;
    void step_to(double t, int segment);

    HamiltonianSpec hspec_;
    LoopSpec lspec_;
    double ep_tolerance_;
    BranchTracker branch_;
    cplx eff_root_{};
    double t_ = 0;
};

/// One-off frame at time t (tracks from t = 0). Throws EPSingularity near
/// the EP and UnsupportedFamily for CUSTOM.
TransportFrame frame_at(const HamiltonianSpec& hspec, const LoopSpec& lspec, double t,
                        double ep_tolerance = 1e-9);

/// f = [J (D'/2) - J' (D/2 + i g)] / (2 i lambda^2).
cplx coupling_f(double gamma, double delta, double j, double delta_dot, double j_dot);

/// f' = [J' (i g + D/2) - J (D'/2)] / (2 i lambda^2).
cplx coupling_f_prime(double gamma, double delta, double j, double delta_dot, double j_dot);

/// Rotation matrix of the frame for this family (Ry(pi/2) T for APT).
CMat2 frame_rotation(const HamiltonianSpec& hspec, const TransportFrame& frame);

struct RiccatiOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double ep_tolerance = 1e-9;
    double blowup = 1e12;
};

/// Propagate psi0 = T psi' in the transported frame under h_tilde and rotate
/// back; returns normalized lab-frame states at `samples` equally spaced
/// times. An independent route to propagate().
std::vector<CVec2> propagate_transported(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                                         const CVec2& psi0, int samples,
                                         const RiccatiOptions& opts = {});

enum class RWhich { R1, R2 };

const char* to_string(RWhich w);

struct RCrossing {
    double t = 0;
    bool upward = true;  ///< |R| goes from below 1 to above 1
};

struct RSeries {
    RWhich which = RWhich::R1;
    std::vector<double> t;
    std::vector<cplx> R;
    std::vector<RCrossing> crossings;
};

/// Integrate R1 or R2 from R(0) = 0 over one period, recording `samples`
/// equally spaced points. Crossings of |R| = 1 are located on every accepted
/// step by linear interpolation. Throws BlowUp with the pole time.
RSeries integrate_R(const HamiltonianSpec& hspec, const LoopSpec& lspec, RWhich which, int samples,
                    const RiccatiOptions& opts = {});

enum class TransitionKind { DNAT, SNAT_CANDIDATE };

const char* to_string(TransitionKind k);

struct TransitionEvent {
    double t = 0;
    TransitionKind kind = TransitionKind::DNAT;
};

/// Times where |C1| and |C2| cross, linearly interpolated between samples.
/// Kind is DNAT when tau_ratio < snat_threshold, SNAT_CANDIDATE otherwise.
std::vector<TransitionEvent> detect_transitions(const TrajectoryRecord& traj, double tau_ratio,
                                                double snat_threshold = 0.1);

/// Same, with tau_ratio from adiabaticity() of the record's own loop and the
/// default threshold.
std::vector<TransitionEvent> detect_transitions(const TrajectoryRecord& traj);

void write_r_series_csv(std::ostream& out, const RSeries& series);

}  // namespace epdyn
