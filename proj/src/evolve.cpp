#include "epdyn/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "epdyn/error.hpp"
#include "ode.hpp"

namespace epdyn {

namespace {

constexpr int kTrackSteps = 4096;

double condition_number(const CVec2& a, const CVec2& b) {
    const CMat2 m = CMat2::from_columns(a, b);
    const double f2 = m.norm() * m.norm();
    const double d = std::abs(m.det());
    if (!(d > 0)) return std::numeric_limits<double>::infinity();
    const double disc = std::sqrt(std::max(0.0, f2 * f2 - 4 * d * d));
    return (f2 + disc) / (2 * d);
}

std::pair<cplx, cplx> solve_basis(const CVec2& psi, const CVec2& a, const CVec2& b,
                                  double max_condition) {
    const double cond = condition_number(a, b);
    if (!(cond <= max_condition))
        throw Error(ErrorCode::IllConditionedBasis, "eigenbasis is ill-conditioned near the EP", {},
                    cond);
    const CVec2 c = CMat2::from_columns(a, b).inverse() * psi;
    return {c.a0, c.a1};
}

void check_inputs(const HamiltonianSpec& hspec, const LoopSpec& lspec, const CVec2& psi0) {
    lspec.validate();
    if (!(hspec.gamma >= 0) || !std::isfinite(hspec.gamma))
        throw Error(ErrorCode::Validation, "hamiltonian.gamma must be >= 0", "hamiltonian.gamma");
    if (hspec.family == Family::CUSTOM && !hspec.custom_matrix)
        throw Error(ErrorCode::MissingCustomMatrix, "CUSTOM family requires a custom matrix",
                    "hamiltonian.custom_matrix");
    if (!psi0.finite() || !(psi0.norm() > 0))
        throw Error(ErrorCode::Validation, "initial state must be finite and nonzero",
                    "initial_state");
}

// Fills decomposition, overlaps and sheet data of already-propagated states.
TrajectoryRecord make_record(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                             const std::vector<double>& times, const std::vector<CVec2>& states,
                             const std::vector<double>& log_norms, const PropagateOptions& opts) {
    TrajectoryRecord rec;
    rec.hamiltonian = hspec;
    rec.loop = lspec;
    BranchTracker tracker(hspec, lspec);
    std::tie(rec.alpha0, rec.beta0) = tracker.vectors();
    rec.samples.reserve(times.size());
    int prev_dominant = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        TrajectorySample s;
        s.t = times[k];
        s.point = path_at(lspec, s.t);
        tracker.advance_to(s.t);
        s.psi = states[k];
        s.raw_log_norm = log_norms[k];
        const auto [va, vb] = tracker.vectors();
        std::tie(s.c1, s.c2) = solve_basis(s.psi, va, vb, opts.max_condition);
        s.ov_alpha = std::min(1.0, std::abs(inner(va, s.psi)));
        s.ov_beta = std::min(1.0, std::abs(inner(vb, s.psi)));
        std::tie(s.lambda_alpha, s.lambda_beta) = tracker.eigenvalues();
        const double w1 = std::norm(s.c1), w2 = std::norm(s.c2);
        s.dominant = w1 > w2 ? 0 : (w2 > w1 ? 1 : prev_dominant);
        prev_dominant = s.dominant;
        s.lambda_proj = (w1 * s.lambda_alpha + w2 * s.lambda_beta) / (w1 + w2);
        if (hspec.family == Family::CUSTOM) {
            s.sheet = s.dominant == 0 ? 1 : -1;
        } else {
            const cplx principal =
                principal_sqrt(root_squared(hspec.gamma, tracker.delta(), tracker.j()));
            const cplx dom = s.dominant == 0 ? tracker.branch().root : -tracker.branch().root;
            s.sheet = std::abs(dom - principal) <= std::abs(dom + principal) ? 1 : -1;
        }
        rec.samples.push_back(s);
    }
    return rec;
}

// Exact propagation of psi0 to each of `times`; states come back normalized
// with the accumulated log norm alongside.
void propagate_states(const HamiltonianSpec& hspec, const LoopSpec& lspec, const CVec2& psi0,
                      const std::vector<double>& times, const PropagateOptions& opts,
                      std::vector<CVec2>& states, std::vector<double>& log_norms) {
    const std::vector<double> breaks = noise_breakpoints(lspec);
    detail::Stepper<2> stepper({opts.rtol, opts.atol, 0.0});
    const double n0 = psi0.norm();
    detail::CState<2> y{psi0.a0 / n0, psi0.a1 / n0};
    double log_norm = std::log(n0);
    double cur = 0;
    std::size_t next_break = 0;
    const bool constant = hspec.family == Family::CUSTOM;
    const CMat2 h_const = constant ? build(hspec, 0, 0) : CMat2{};
    // Parametric families differ from their traceless part by a scalar -i g; that
    // factor only scales the norm and is applied in closed form.
    const cplx shift = constant ? cplx{} : trace_shift(hspec);
    const CMat2 strip = shift * CMat2::identity();

    auto renormalize = [&](double t) {
        const double n = std::sqrt(std::norm(y[0]) + std::norm(y[1]));
        if (!std::isfinite(n))
            throw Error(ErrorCode::StepSizeUnderflow, "state became non-finite", {}, t);
        if (n < 1e-300)
            throw Error(ErrorCode::DecayUnderflow, "state norm underflowed between checkpoints",
                        {}, t);
        y[0] /= n;
        y[1] /= n;
        log_norm += std::log(n);
    };

    states.clear();
    log_norms.clear();
    for (double target : times) {
        while (cur < target) {
            while (next_break < breaks.size() && breaks[next_break] <= cur) ++next_break;
            const double stop =
                next_break < breaks.size() ? std::min(target, breaks[next_break]) : target;
            const int seg = segment_of(lspec, 0.5 * (cur + stop));
            auto rhs = [&](const detail::CState<2>& x, detail::CState<2>& dx, double t) {
                CMat2 h = h_const;
                if (!constant) {
                    const PathPoint p = path_in_segment(lspec, t, seg);
                    h = build(hspec, p.delta, p.j) - strip;
                }
                dx[0] = -kI * (h.m00 * x[0] + h.m01 * x[1]);
                dx[1] = -kI * (h.m10 * x[0] + h.m11 * x[1]);
            };
            stepper.advance(rhs, y, cur, stop);
            log_norm += shift.imag() * (stop - cur);
            renormalize(stop);
            cur = stop;
        }
        states.push_back({y[0], y[1]});
        log_norms.push_back(log_norm);
    }
}

std::vector<double> uniform_times(double period, int samples) {
    std::vector<double> t(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) t[static_cast<std::size_t>(k)] = period * k / (samples - 1);
    t.back() = period;
    return t;
}

}  // namespace

CVec2 TrajectoryRecord::raw_state(std::size_t k) const {
    const TrajectorySample& s = samples.at(k);
    return std::exp(s.raw_log_norm) * s.psi;
}

BranchTracker::BranchTracker(const HamiltonianSpec& hspec, const LoopSpec& lspec)
    : hspec_(hspec), lspec_(lspec) {
    const PathPoint p = path_at(lspec, 0.0);
    delta_ = p.delta;
    j_ = p.j;
    if (hspec.family == Family::CUSTOM) {
        custom_ = eigensystem(hspec, 0, 0);
        return;
    }
    if (2 * std::abs(principal_sqrt(root_squared(hspec.gamma, delta_, j_))) < 1e-9)
        throw Error(ErrorCode::DegenerateAtEP, "loop starts at the EP");
    branch_ = start_branch(hspec.gamma, delta_, j_);
}

void BranchTracker::advance_to(double t, int segment) {
    if (t < t_ - 1e-12 * lspec_.period)
        throw Error(ErrorCode::OutOfRange, "branch tracker cannot move backward", "t", t);
    t = std::max(t, t_);
    if (hspec_.family == Family::CUSTOM) {
        t_ = t;
        return;
    }
    const double max_step = lspec_.period / kTrackSteps;
    const int n = std::max(1, static_cast<int>(std::ceil((t - t_) / max_step)));
    const double t_start = t_;
    for (int i = 1; i <= n; ++i) {
        const double ti = i == n ? t : t_start + (t - t_start) * i / n;
        const int seg = (i == n && segment >= 0) ? segment : segment_of(lspec_, ti);
        const PathPoint p = path_in_segment(lspec_, ti, seg);
        branch_ = continue_branch(hspec_.gamma, p.delta, p.j, branch_);
        delta_ = p.delta;
        j_ = p.j;
    }
    t_ = t;
}

std::pair<CVec2, CVec2> BranchTracker::vectors() const {
    if (hspec_.family == Family::CUSTOM)
        return {custom_.v_plus.normalized(), custom_.v_minus.normalized()};
    const auto [a, b] = branch_vectors(hspec_, branch_);
    return {a.normalized(), b.normalized()};
}

std::pair<cplx, cplx> BranchTracker::eigenvalues() const {
    if (hspec_.family == Family::CUSTOM) return {custom_.lambda_plus, custom_.lambda_minus};
    const cplx shift = trace_shift(hspec_);
    return {shift + branch_.root, shift - branch_.root};
}

std::pair<cplx, cplx> decompose(const CVec2& psi, const EigenPair& eig, double max_condition) {
    return solve_basis(psi, eig.v_plus.normalized(), eig.v_minus.normalized(), max_condition);
}

std::pair<double, double> overlaps(const CVec2& psi, const EigenPair& eig) {
    const CVec2 p = psi.normalized();
    return {std::min(1.0, std::abs(inner(eig.v_plus.normalized(), p))),
            std::min(1.0, std::abs(inner(eig.v_minus.normalized(), p)))};
}

TrajectoryRecord propagate(const HamiltonianSpec& hspec, const LoopSpec& lspec, const CVec2& psi0,
                           int samples, const PropagateOptions& opts) {
    if (samples < 2) throw Error(ErrorCode::Validation, "samples must be >= 2", "loop.samples");
    lspec.validate();
    return propagate_at(hspec, lspec, psi0, uniform_times(lspec.period, samples), opts);
}

TrajectoryRecord propagate_at(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                              const CVec2& psi0, const std::vector<double>& times,
                              const PropagateOptions& opts) {
    check_inputs(hspec, lspec, psi0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] >= 0 && times[k] <= lspec.period))
            throw Error(ErrorCode::OutOfRange, "record time outside [0, T]", "t", times[k]);
        if (k > 0 && times[k] < times[k - 1])
            throw Error(ErrorCode::Validation, "record times must be increasing", "times");
    }
    std::vector<CVec2> states;
    std::vector<double> log_norms;
    propagate_states(hspec, lspec, psi0, times, opts, states, log_norms);
    return make_record(hspec, lspec, times, states, log_norms, opts);
}

TrajectoryRecord piecewise_emulate(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                                   const CVec2& psi0, int n_segments,
                                   const PropagateOptions& opts) {
    if (n_segments < 1)
        throw Error(ErrorCode::Validation, "n_segments must be >= 1", "n_segments");
    check_inputs(hspec, lspec, psi0);
    const std::vector<double> grid = uniform_times(lspec.period, n_segments + 1);
    const std::vector<double> starts(grid.begin(), grid.end() - 1);
    std::vector<CVec2> exact;
    std::vector<double> exact_log;
    propagate_states(hspec, lspec, psi0, starts, opts, exact, exact_log);

    std::vector<CVec2> states{exact.front()};
    std::vector<double> log_norms{exact_log.front()};
    const double dt = lspec.period / n_segments;
    for (int n = 0; n < n_segments; ++n) {
        const PathPoint p = path_at(lspec, starts[static_cast<std::size_t>(n)]);
        const CVec2 out = mat_exp(build(hspec, p.delta, p.j), dt) * exact[static_cast<std::size_t>(n)];
        const double norm = out.norm();
        if (!(norm > 1e-300))
            throw Error(ErrorCode::DecayUnderflow, "piecewise step underflowed", {}, grid[n + 1]);
        states.push_back(out.normalized());
        log_norms.push_back(exact_log[static_cast<std::size_t>(n)] + std::log(norm));
    }
    return make_record(hspec, lspec, grid, states, log_norms, opts);
}

double max_overlap_deviation(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    if (a.samples.size() != b.samples.size())
        throw Error(ErrorCode::Validation, "records have different sample grids", "samples");
    double dev = 0;
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
        dev = std::max(dev, std::abs(a.samples[k].ov_alpha - b.samples[k].ov_alpha));
        dev = std::max(dev, std::abs(a.samples[k].ov_beta - b.samples[k].ov_beta));
    }
    return dev;
}

AdiabaticityReport adiabaticity(const HamiltonianSpec& hspec, const LoopSpec& lspec, int grid,
                                double ep_tolerance) {
    if (grid < 64) throw Error(ErrorCode::Validation, "grid must be >= 64", "grid");
    lspec.validate();
    auto gap_at = [&](double phi) {
        const double d = lspec.radius * std::sin(phi);
        const double j = lspec.j_center + lspec.radius * std::cos(phi);
        return std::abs(eigensystem(hspec, d, j, {ep_tolerance, false}).gap);
    };
    const double step = 2 * kPi / grid;
    int best = 0;
    double best_gap = gap_at(0);
    for (int k = 1; k < grid; ++k) {
        const double g = gap_at(k * step);
        if (g < best_gap) {
            best_gap = g;
            best = k;
        }
    }
    // Golden-section refinement of the minimum gap around the best sample.
    const double inv_phi = (std::sqrt(5.0) - 1) / 2;
    double lo = (best - 1) * step, hi = (best + 1) * step;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double g1 = gap_at(x1), g2 = gap_at(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (g1 < g2) {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = gap_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = gap_at(x2);
        }
    }
    double phi = 0.5 * (lo + hi);
    double min_gap = gap_at(phi);
    if (best_gap < min_gap) {
        min_gap = best_gap;
        phi = best * step;
    }
    if (min_gap < ep_tolerance)
        throw Error(ErrorCode::LoopThroughEP, "loop passes through the EP", {}, min_gap);
    AdiabaticityReport rep;
    rep.min_gap = min_gap;
    rep.tau_crit = 1 / min_gap;
    rep.ratio = rep.tau_crit / lspec.period;
    rep.argmax_theta = std::fmod(std::fmod(phi, 2 * kPi) + 2 * kPi, 2 * kPi);
    return rep;
}

std::pair<double, double> transfer_fidelity(const TrajectoryRecord& traj,
                                            const std::pair<CVec2, CVec2>& targets) {
    const CVec2 psi = traj.final().psi;
    return {std::norm(inner(targets.first.normalized(), psi)),
            std::norm(inner(targets.second.normalized(), psi))};
}

std::pair<CVec2, CVec2> initial_eigenstates(const HamiltonianSpec& hspec, const LoopSpec& lspec) {
    return BranchTracker(hspec, lspec).vectors();
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& traj) {
    out << "t_us,theta_rad,delta,j,kappa,re_psi0,im_psi0,re_psi1,im_psi1,raw_log_norm,abs_c1,"
           "abs_c2,ov_alpha,ov_beta,sheet,re_lambda_proj,im_lambda_proj\n";
    char buf[1024];
    for (const TrajectorySample& s : traj.samples) {
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                      "%.17g,%.17g,%s,%.17g,%.17g\n",
                      s.t, s.point.theta, s.point.delta, s.point.j, s.point.kappa, s.psi.a0.real(),
                      s.psi.a0.imag(), s.psi.a1.real(), s.psi.a1.imag(), s.raw_log_norm,
                      std::abs(s.c1), std::abs(s.c2), s.ov_alpha, s.ov_beta,
                      s.sheet > 0 ? "+" : "-", s.lambda_proj.real(), s.lambda_proj.imag());
        out << buf;
    }
}

}  // namespace epdyn
