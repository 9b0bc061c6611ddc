#pragma once

// Non-Hermitian Schrodinger propagation along an encircling loop,
// i d/dt psi = H(t) psi, with the state decomposed onto the continuously
// tracked instantaneous eigenvectors alpha(t), beta(t).

#include <iosfwd>
#include <utility>
#include <vector>

#include "epdyn/core.hpp"
#include "epdyn/loop.hpp"
#include "epdyn/model.hpp"

namespace epdyn {

struct PropagateOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double ep_tolerance = 1e-9;
    double max_condition = 1e8;  ///< decompose() limit on cond([alpha beta])
};

struct TrajectorySample {
    double t = 0;
    PathPoint point;
    CVec2 psi;              ///< normalized state
    double raw_log_norm = 0;  ///< log of the unnormalized norm
    cplx c1{}, c2{};        ///< psi = c1 alpha + c2 beta (unit-norm alpha, beta)
    double ov_alpha = 0, ov_beta = 0;
    int sheet = 1;          ///< +1 when the dominant component sits on the principal-root sheet
    int dominant = 0;       ///< 0 alpha, 1 beta
    cplx lambda_alpha{}, lambda_beta{};
    cplx lambda_proj{};
};

struct TrajectoryRecord {
    HamiltonianSpec hamiltonian;
    LoopSpec loop;
    CVec2 alpha0, beta0;  ///< normalized eigenvectors at t = 0
    std::vector<TrajectorySample> samples;

    const TrajectorySample& final() const { return samples.back(); }
    /// Raw (unnormalized) amplitude at sample k.
    CVec2 raw_state(std::size_t k) const;
};

struct AdiabaticityReport {
    double tau_crit = 0;      ///< us
    double ratio = 0;         ///< tau_crit / T
    double min_gap = 0;       ///< 1/us
    double argmax_theta = 0;  ///< rad in [0, 2 pi)
};

/// Walks the branch (root and half-angle gauge) along a loop from t = 0.
/// Steps larger than period / 4096 are subdivided so the sign continuation
/// never jumps sheets.
class BranchTracker {
public:
    BranchTracker(const HamiltonianSpec& hspec, const LoopSpec& lspec);

    /// Advance to time t >= current time; `segment` picks the noise level
    /// (negative means segment_of(t)).
    void advance_to(double t, int segment = -1);

    double time() const { return t_; }
    const Branch& branch() const { return branch_; }
    /// Unit-norm (alpha, beta) at the current time.
    std::pair<CVec2, CVec2> vectors() const;
    /// (lambda_alpha, lambda_beta) including the trace shift.
    std::pair<cplx, cplx> eigenvalues() const;
    /// Current (Delta, J).
    double delta() const { return delta_; }
    double j() const { return j_; }

private:
    HamiltonianSpec hspec_;
    LoopSpec lspec_;
    EigenPair custom_;
    double t_ = 0;
    double delta_ = 0, j_ = 0;
    Branch branch_;
};

/// Biorthogonal coefficients of psi in the unit-normalized eigenbasis.
/// Throws IllConditionedBasis when cond([v+ v-]) exceeds max_condition.
std::pair<cplx, cplx> decompose(const CVec2& psi, const EigenPair& eig,
                                double max_condition = 1e8);

/// |<v/|v|, psi>| for both eigenvectors; psi is normalized here as well.
std::pair<double, double> overlaps(const CVec2& psi, const EigenPair& eig);

/// Propagate psi0 over one period and record `samples` equally spaced
/// points including t = 0 and t = T.
TrajectoryRecord propagate(const HamiltonianSpec& hspec, const LoopSpec& lspec, const CVec2& psi0,
                           int samples, const PropagateOptions& opts = {});

/// Same, recorded at the given increasing times in [0, T].
TrajectoryRecord propagate_at(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                              const CVec2& psi0, const std::vector<double>& times,
                              const PropagateOptions& opts = {});

/// Experimental piecewise protocol: N + 1 records at t_n = n T / N. Record
/// n + 1 is the exactly propagated state at t_n evolved for T / N under the
/// frozen H(t_n).
TrajectoryRecord piecewise_emulate(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                                   const CVec2& psi0, int n_segments,
                                   const PropagateOptions& opts = {});

/// Largest |ov_x(a) - ov_x(b)| over both overlaps and all shared samples.
/// The records must share their time grid.
double max_overlap_deviation(const TrajectoryRecord& a, const TrajectoryRecord& b);

/// tau_crit = max over the noise-free loop of 1 / |lambda1 - lambda2|.
/// Throws LoopThroughEP when the gap drops below ep_tolerance.
AdiabaticityReport adiabaticity(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                                int grid = 4096, double ep_tolerance = 1e-9);

/// |<target, psi(T)>|^2 for both (normalized) targets.
std::pair<double, double> transfer_fidelity(const TrajectoryRecord& traj,
                                            const std::pair<CVec2, CVec2>& targets);

/// Unit-norm (alpha, beta) at the start of the loop.
std::pair<CVec2, CVec2> initial_eigenstates(const HamiltonianSpec& hspec, const LoopSpec& lspec);

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& traj);

}  // namespace epdyn
