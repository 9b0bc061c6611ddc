#include "epdyn/topology.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>

#include "epdyn/error.hpp"
#include "epdyn/transport.hpp"

namespace epdyn {

namespace {

using XFunc = std::function<cplx(double t, int segment)>;

// Unwrapped change of arg X along the loop, with nodes at the uniform grid
// and at every noise jump. Jumps contribute their principal-value step.
VorticityResult wind(const LoopSpec& lspec, int grid, const VorticityOptions& opts, const XFunc& x,
                     ErrorCode collapse_code, std::vector<WindingSample>* trace) {
    if (grid < 256) throw Error(ErrorCode::Validation, "grid must be >= 256", "grid");
    lspec.validate();

    std::vector<double> nodes;
    nodes.reserve(static_cast<std::size_t>(grid) + 1);
    for (int k = 0; k <= grid; ++k) nodes.push_back(k == grid ? lspec.period : lspec.period * k / grid);
    for (double b : noise_breakpoints(lspec)) nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    double gap_min = std::numeric_limits<double>::infinity();
    auto eval = [&](double t, int seg) {
        const cplx v = x(t, seg);
        const double gap = 2 * std::sqrt(std::abs(v));
        gap_min = std::min(gap_min, gap);
        if (!(gap >= opts.ep_tolerance))
            throw Error(collapse_code, "gap closes on the loop", {}, t);
        return v;
    };

    std::function<double(double, cplx, double, cplx, int)> step = [&](double a, cplx xa, double b,
                                                                       cplx xb, int depth) {
        const double d = std::arg(xb / xa);
        if (std::abs(d) < kPi / 2) return d;
        if (depth >= opts.max_depth)
            throw Error(ErrorCode::RefinementLimit, "phase step unresolved at maximum refinement",
                        {}, a);
        const double m = 0.5 * (a + b);
        const int seg = segment_of(lspec, m);
        const cplx xm = eval(m, seg);
        return step(a, xa, m, xm, depth + 1) + step(m, xm, b, xb, depth + 1);
    };

    double total = 0;
    int seg = segment_of(lspec, 0.5 * (nodes[0] + nodes[1]));
    cplx prev = eval(0.0, seg);
    const double arg0 = std::arg(prev);
    auto record = [&](double t, cplx v) {
        if (!trace) return;
        const double gap_arg = 0.5 * (arg0 + total);
        trace->push_back({t, lspec.omega() * t + lspec.theta0,
                          2 * std::sqrt(std::abs(v)) * std::polar(1.0, gap_arg), gap_arg});
    };
    record(0.0, prev);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double a = nodes[i - 1], b = nodes[i];
        const int s = segment_of(lspec, 0.5 * (a + b));
        if (s != seg) {
            const cplx jumped = eval(a, s);
            total += std::arg(jumped / prev);
            prev = jumped;
            seg = s;
        }
        const cplx xb = eval(b, seg);
        total += step(a, prev, b, xb, 0);
        prev = xb;
        record(b, xb);
    }
    const int end_seg = segment_of(lspec, lspec.period);
    if (end_seg != seg) total += std::arg(eval(lspec.period, end_seg) / prev);

    VorticityResult r;
    r.raw = -total / (4 * kPi);
    r.quantized = std::round(2 * r.raw) / 2;
    r.residual = std::abs(r.raw - r.quantized);
    r.quantized_ok = r.residual < opts.quantization_tolerance;
    r.gap_min = gap_min;
    return r;
}

int enclosed_or_zero(const HamiltonianSpec& hspec, const LoopSpec& lspec, double tol) {
    if (!is_parametric_family(hspec.family)) return 0;
    return enclosed_ep_count(lspec, hspec.gamma, tol);
}

}  // namespace

VorticityResult spectral_vorticity(const HamiltonianSpec& hspec, const LoopSpec& lspec, int grid,
                                   const VorticityOptions& opts,
                                   std::vector<WindingSample>* trace) {
    XFunc x;
    if (hspec.family == Family::CUSTOM) {
        const CMat2 m = build(hspec, 0, 0);
        const CMat2 b = m - (0.5 * m.trace()) * CMat2::identity();
        const cplx v = -b.det();
        x = [v](double, int) { return v; };
    } else {
        x = [&](double t, int seg) {
            const PathPoint p = path_in_segment(lspec, t, seg);
            return root_squared(hspec.gamma, p.delta, p.j);
        };
    }
    VorticityResult r = wind(lspec, grid, opts, x, ErrorCode::GapCollapse, trace);
    r.enclosed_eps = enclosed_or_zero(hspec, lspec, opts.ep_tolerance);
    return r;
}

VorticityResult dynamic_vorticity(const HamiltonianSpec& hspec, const LoopSpec& lspec, int grid,
                                  const VorticityOptions& opts,
                                  std::vector<WindingSample>* trace) {
    if (!is_parametric_family(hspec.family))
        throw Error(ErrorCode::UnsupportedFamily, "dynamic vorticity needs a parametric family",
                    "hamiltonian.family");
    const XFunc x = [&](double t, int seg) {
        const PathPoint p = path_in_segment(lspec, t, seg);
        const PathRate r = rate_in_segment(lspec, t, seg);
        const cplx l2 = root_squared(hspec.gamma, p.delta, p.j);
        if (2 * std::sqrt(std::abs(l2)) < opts.ep_tolerance)
            throw Error(ErrorCode::GapCollapse, "loop passes through the EP", {}, t);
        const cplx f = coupling_f(hspec.gamma, p.delta, p.j, r.delta_dot, r.j_dot);
        return l2 - f * f;
    };
    VorticityResult r = wind(lspec, grid, opts, x, ErrorCode::EffectiveGapCollapse, trace);
    r.enclosed_eps = enclosed_or_zero(hspec, lspec, opts.ep_tolerance);
    return r;
}

int enclosed_ep_count(const LoopSpec& lspec, double gamma, double ep_tolerance) {
    lspec.validate();
    std::vector<double> eps{gamma};
    if (gamma != 0) eps.push_back(-gamma);
    const int n = 4096;
    int count = 0;
    for (double j_ep : eps) {
        const double dist = std::abs(std::hypot(0.0, lspec.j_center - j_ep) - lspec.radius);
        if (dist < ep_tolerance)
            throw Error(ErrorCode::EPOnPath, "an EP lies on the loop", {}, j_ep);
        double total = 0;
        double prev = std::atan2(lspec.j_center + lspec.radius - j_ep, 0.0);
        for (int k = 1; k <= n; ++k) {
            const double th = 2 * kPi * k / n;
            const double cur = std::atan2(lspec.j_center + lspec.radius * std::cos(th) - j_ep,
                                          lspec.radius * std::sin(th));
            total += std::remainder(cur - prev, 2 * kPi);
            prev = cur;
        }
        count += static_cast<int>(std::lround(std::abs(total) / (2 * kPi)));
    }
    return count;
}

void write_winding_csv(std::ostream& out, const std::vector<WindingSample>& trace) {
    out << "t_us,theta_rad,re_gap,im_gap,unwrapped_arg\n";
    char buf[256];
    for (const WindingSample& w : trace) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", w.t, w.theta,
                      w.gap.real(), w.gap.imag(), w.unwrapped_arg);
        out << buf;
    }
}

}  // namespace epdyn
