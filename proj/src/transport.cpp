#include "epdyn/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "epdyn/error.hpp"
#include "ode.hpp"

namespace epdyn {

namespace {

constexpr int kTrackSteps = 4096;

void require_parametric_family(const HamiltonianSpec& hspec) {
    if (!is_parametric_family(hspec.family))
        throw Error(ErrorCode::UnsupportedFamily,
                    "transported frame needs a parametric family, not CUSTOM", "hamiltonian.family");
}

}  // namespace

cplx coupling_f(double gamma, double delta, double j, double delta_dot, double j_dot) {
    const cplx a{delta / 2, gamma};
    return (j * (delta_dot / 2) - j_dot * a) / (2.0 * kI * root_squared(gamma, delta, j));
}

cplx coupling_f_prime(double gamma, double delta, double j, double delta_dot, double j_dot) {
    const cplx a{delta / 2, gamma};
    return (j_dot * a - j * (delta_dot / 2)) / (2.0 * kI * root_squared(gamma, delta, j));
}

FrameTracker::FrameTracker(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                           double ep_tolerance)
    : hspec_((require_parametric_family(hspec), hspec)),
      lspec_(lspec),
      ep_tolerance_(ep_tolerance),
      branch_(hspec, lspec) {
    const PathPoint p = path_at(lspec, 0.0);
    const PathRate r = rate_in_segment(lspec, 0.0, 0);
    const cplx lam = -branch_.branch().root;
    const cplx f = coupling_f(hspec.gamma, p.delta, p.j, r.delta_dot, r.j_dot);
    eff_root_ = align_sign(principal_sqrt(lam * lam - f * f), lam);
}

void FrameTracker::step_to(double t, int segment) {
    branch_.advance_to(t, segment);
    const int seg = segment >= 0 ? segment : segment_of(lspec_, t);
    const PathPoint p = path_in_segment(lspec_, t, seg);
    const PathRate r = rate_in_segment(lspec_, t, seg);
    const cplx lam = -branch_.branch().root;
    const cplx f = coupling_f(hspec_.gamma, p.delta, p.j, r.delta_dot, r.j_dot);
    eff_root_ = align_sign(principal_sqrt(lam * lam - f * f), eff_root_);
    t_ = t;
}

TransportFrame FrameTracker::at(double t, int segment) {
    if (t < t_ - 1e-12 * lspec_.period)
        throw Error(ErrorCode::OutOfRange, "frame tracker cannot move backward", "t", t);
    t = std::max(t, t_);
    const double max_step = lspec_.period / kTrackSteps;
    const int n = std::max(1, static_cast<int>(std::ceil((t - t_) / max_step)));
    const double t_start = t_;
    for (int i = 1; i <= n; ++i) {
        const double ti = i == n ? t : t_start + (t - t_start) * i / n;
        step_to(ti, i == n ? segment : -1);
    }
    return assemble(t, segment >= 0 ? segment : segment_of(lspec_, t));
}

TransportFrame FrameTracker::assemble(double t, int segment) const {
    const Branch& b = branch_.branch();
    if (2 * std::abs(b.root) < ep_tolerance_)
        throw Error(ErrorCode::EPSingularity, "coupling f diverges at the EP", {}, t);
    const PathPoint p = path_in_segment(lspec_, t, segment);
    const PathRate r = rate_in_segment(lspec_, t, segment);
    TransportFrame fr;
    fr.t = t;
    fr.theta_c = -2.0 * kI * std::log(b.c + kI * b.s);
    fr.T_mat = {b.c, -b.s, b.s, b.c};
    fr.f = coupling_f(hspec_.gamma, p.delta, p.j, r.delta_dot, r.j_dot);
    fr.lambda = -b.root;
    const cplx shift = trace_shift(hspec_);
    fr.h_tilde = {shift - fr.lambda, fr.f, -fr.f, shift + fr.lambda};
    fr.eff_root = eff_root_;
    fr.e_plus = shift + eff_root_;
    fr.e_minus = shift - eff_root_;
    return fr;
}

TransportFrame frame_at(const HamiltonianSpec& hspec, const LoopSpec& lspec, double t,
                        double ep_tolerance) {
    lspec.validate();
    path_at(lspec, t);  // range check
    FrameTracker tracker(hspec, lspec, ep_tolerance);
    return tracker.at(t);
}

CMat2 frame_rotation(const HamiltonianSpec& hspec, const TransportFrame& frame) {
    return is_apt(hspec.family) ? rotation_y(kPi / 2) * frame.T_mat : frame.T_mat;
}

std::vector<CVec2> propagate_transported(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                                         const CVec2& psi0, int samples,
                                         const RiccatiOptions& opts) {
    require_parametric_family(hspec);
    lspec.validate();
    if (samples < 2) throw Error(ErrorCode::Validation, "samples must be >= 2", "loop.samples");
    const double g = hspec.gamma;
    const cplx shift = trace_shift(hspec);
    const CMat2 outer = is_apt(hspec.family) ? rotation_y(kPi / 2) : CMat2::identity();
    auto rotation = [&](const Branch& b) { return outer * CMat2{b.c, -b.s, b.s, b.c}; };

    Branch br = BranchTracker(hspec, lspec).branch();
    const CVec2 start = rotation(br).inverse() * psi0.normalized();
    detail::CState<2> y{start.a0, start.a1};

    const std::vector<double> breaks = noise_breakpoints(lspec);
    std::size_t next_break = 0;
    detail::Stepper<2> stepper({opts.rtol, opts.atol, 0.0});
    double cur = 0;
    int seg = 0;
    std::vector<CVec2> out{psi0.normalized()};
    for (int k = 1; k < samples; ++k) {
        const double target = k == samples - 1 ? lspec.period : lspec.period * k / (samples - 1);
        while (cur < target) {
            while (next_break < breaks.size() && breaks[next_break] <= cur) ++next_break;
            const double stop =
                next_break < breaks.size() ? std::min(target, breaks[next_break]) : target;
            const int next_seg = segment_of(lspec, 0.5 * (cur + stop));
            if (next_seg != seg) {
                // The radius jumps, so does the frame; psi itself is continuous.
                const PathPoint p = path_in_segment(lspec, cur, next_seg);
                const Branch nb = continue_branch(g, p.delta, p.j, br);
                const CVec2 v = rotation(nb).inverse() * (rotation(br) * CVec2{y[0], y[1]});
                y = {v.a0, v.a1};
                br = nb;
                seg = next_seg;
            }
            auto rhs = [&](const detail::CState<2>& x, detail::CState<2>& dx, double t) {
                const PathPoint p = path_in_segment(lspec, t, seg);
                const PathRate r = rate_in_segment(lspec, t, seg);
                const cplx lam =
                    -align_sign(principal_sqrt(root_squared(g, p.delta, p.j)), br.root);
                const cplx f = coupling_f(g, p.delta, p.j, r.delta_dot, r.j_dot);
                dx[0] = -kI * ((shift - lam) * x[0] + f * x[1]);
                dx[1] = -kI * (-f * x[0] + (shift + lam) * x[1]);
            };
            auto after = [&](double t, const detail::CState<2>&) {
                const PathPoint p = path_in_segment(lspec, t, seg);
                br = continue_branch(g, p.delta, p.j, br);
            };
            stepper.advance(rhs, y, cur, stop, after);
            const double n = std::sqrt(std::norm(y[0]) + std::norm(y[1]));
            if (!(n > 1e-300) || !std::isfinite(n))
                throw Error(ErrorCode::DecayUnderflow, "transported state lost its norm", {}, stop);
            y[0] /= n;
            y[1] /= n;
            cur = stop;
        }
        out.push_back((rotation(br) * CVec2{y[0], y[1]}).normalized());
    }
    return out;
}

const char* to_string(RWhich w) { return w == RWhich::R1 ? "R1" : "R2"; }

const char* to_string(TransitionKind k) {
    return k == TransitionKind::DNAT ? "DNAT" : "SNAT_CANDIDATE";
}

RSeries integrate_R(const HamiltonianSpec& hspec, const LoopSpec& lspec, RWhich which, int samples,
                    const RiccatiOptions& opts) {
    require_parametric_family(hspec);
    lspec.validate();
    if (samples < 2) throw Error(ErrorCode::Validation, "samples must be >= 2", "loop.samples");

    RSeries out;
    out.which = which;
    const double g = hspec.gamma;
    const bool apt = is_apt(hspec.family);
    const double sign = which == RWhich::R1 ? 1.0 : -1.0;

    Branch br = BranchTracker(hspec, lspec).branch();
    double t_prev = 0, abs_prev = 0;
    int seg = 0;

    const std::vector<double> breaks = noise_breakpoints(lspec);
    std::size_t next_break = 0;
    detail::Stepper<1> stepper({opts.rtol, opts.atol, 0.0});
    detail::CState<1> y{cplx{}};
    double cur = 0;

    // The eigenbasis jumps with the noisy radius: (C1, C2) -> M (C1, C2) with
    // M = T_new^-1 T_old, a Mobius map on the ratio.
    auto jump = [&](double t, int new_seg) {
        const PathPoint p = path_in_segment(lspec, t, new_seg);
        const Branch nb = continue_branch(g, p.delta, p.j, br);
        const CMat2 m =
            CMat2{nb.c, -nb.s, nb.s, nb.c}.inverse() * CMat2{br.c, -br.s, br.s, br.c};
        const cplx r = y[0];
        y[0] = which == RWhich::R1 ? (m.m10 + m.m11 * r) / (m.m00 + m.m01 * r)
                                   : (m.m01 + m.m00 * r) / (m.m11 + m.m10 * r);
        br = nb;
        seg = new_seg;
    };

    out.t.push_back(0.0);
    out.R.push_back(y[0]);
    for (int k = 1; k < samples; ++k) {
        const double target = k == samples - 1 ? lspec.period : lspec.period * k / (samples - 1);
        while (cur < target) {
            while (next_break < breaks.size() && breaks[next_break] <= cur) ++next_break;
            const double stop =
                next_break < breaks.size() ? std::min(target, breaks[next_break]) : target;
            const int next_seg = segment_of(lspec, 0.5 * (cur + stop));
            if (next_seg != seg) jump(cur, next_seg);
            auto rhs = [&](const detail::CState<1>& x, detail::CState<1>& dx, double t) {
                const PathPoint p = path_in_segment(lspec, t, seg);
                const PathRate r = rate_in_segment(lspec, t, seg);
                const cplx rho = align_sign(principal_sqrt(root_squared(g, p.delta, p.j)), br.root);
                const cplx lam = -rho;
                // Coupling term i f for PT, -i f' for APT.
                const cplx coupling =
                    apt ? -kI * coupling_f_prime(g, p.delta, p.j, r.delta_dot, r.j_dot)
                        : kI * coupling_f(g, p.delta, p.j, r.delta_dot, r.j_dot);
                dx[0] = sign * (-2.0 * kI * lam * x[0] + coupling * (1.0 + x[0] * x[0]));
            };
            auto after = [&](double t, const detail::CState<1>& x) {
                const PathPoint p = path_in_segment(lspec, t, seg);
                if (2 * std::sqrt(std::abs(root_squared(g, p.delta, p.j))) < opts.ep_tolerance)
                    throw Error(ErrorCode::EPSingularity, "coupling f diverges at the EP", {}, t);
                br = continue_branch(g, p.delta, p.j, br);
                const double a = std::abs(x[0]);
                if (!(a <= opts.blowup))
                    throw Error(ErrorCode::BlowUp, "relative amplitude hit a Riccati pole", {}, t);
                if ((abs_prev - 1) * (a - 1) < 0 || (abs_prev < 1 && a == 1)) {
                    const double tc = t_prev + (1 - abs_prev) / (a - abs_prev) * (t - t_prev);
                    out.crossings.push_back({tc, a > abs_prev});
                }
                t_prev = t;
                abs_prev = a;
            };
            stepper.advance(rhs, y, cur, stop, after);
            cur = stop;
        }
        // Samples on a jump (and t = T, which wraps to segment 0) read the
        // path with the new segment's noise.
        if (seg != segment_of(lspec, target)) jump(target, segment_of(lspec, target));
        out.t.push_back(target);
        out.R.push_back(y[0]);
    }
    return out;
}

std::vector<TransitionEvent> detect_transitions(const TrajectoryRecord& traj, double tau_ratio,
                                                double snat_threshold) {
    const TransitionKind kind =
        tau_ratio < snat_threshold ? TransitionKind::DNAT : TransitionKind::SNAT_CANDIDATE;
    std::vector<TransitionEvent> events;
    const auto& s = traj.samples;
    for (std::size_t k = 1; k < s.size(); ++k) {
        const double d0 = std::abs(s[k - 1].c1) - std::abs(s[k - 1].c2);
        const double d1 = std::abs(s[k].c1) - std::abs(s[k].c2);
        if (d0 * d1 < 0 || (d1 == 0 && d0 != 0)) {
            const double tc = s[k - 1].t + d0 / (d0 - d1) * (s[k].t - s[k - 1].t);
            events.push_back({tc, kind});
        }
    }
    return events;
}

std::vector<TransitionEvent> detect_transitions(const TrajectoryRecord& traj) {
    LoopSpec clean = traj.loop;
    clean.noise_intensity = 0;
    const double ratio = adiabaticity(traj.hamiltonian, clean).ratio;
    return detect_transitions(traj, ratio);
}

void write_r_series_csv(std::ostream& out, const RSeries& series) {
    out << "t_us,re_R,im_R,abs_R\n";
    char buf[256];
    for (std::size_t k = 0; k < series.t.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", series.t[k], series.R[k].real(),
                      series.R[k].imag(), std::abs(series.R[k]));
        out << buf;
    }
}

}  // namespace epdyn
