#include "epdyn/loop.hpp"

#include <algorithm>
#include <cmath>

#include "epdyn/core.hpp"
#include "epdyn/error.hpp"

namespace epdyn {

const char* to_string(Direction d) { return d == Direction::CW ? "CW" : "CCW"; }

double LoopSpec::omega() const {
    const double w = 2 * kPi / period;
    return direction == Direction::CW ? w : -w;
}

void LoopSpec::validate() const {
    auto fail = [](const char* field, const std::string& what) {
        throw Error(ErrorCode::Validation, std::string("loop.") + field + " " + what,
                    std::string("loop.") + field);
    };
    if (!std::isfinite(j_center)) fail("j_center", "must be finite");
    if (!(radius > 0) || !std::isfinite(radius)) fail("radius", "must be > 0");
    if (!std::isfinite(theta0)) fail("theta0", "must be finite");
    if (!(period > 0) || !std::isfinite(period)) fail("period", "must be > 0");
    if (samples < 2) fail("samples", "must be >= 2");
    if (!(noise_intensity >= 0) || !std::isfinite(noise_intensity))
        fail("noise_intensity", "must be >= 0");
    if (noise_segments < 1) fail("noise_segments", "must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double noise_value(std::uint64_t seed, double ir, int segment) {
    if (ir == 0) return 0.0;
    const std::uint64_t state =
        seed + static_cast<std::uint64_t>(segment + 1) * 0x9E3779B97F4A7C15ULL;
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    return ir * (2 * u - 1);
}

std::vector<double> noise_sequence(std::uint64_t seed, double ir, int segments) {
    std::vector<double> out(static_cast<std::size_t>(std::max(segments, 0)));
    for (int k = 0; k < segments; ++k) out[static_cast<std::size_t>(k)] = noise_value(seed, ir, k);
    return out;
}

int segment_of(const LoopSpec& spec, double t) {
    const int n = spec.noise_segments;
    int k = static_cast<int>(std::floor(t / spec.period * n));
    k = std::clamp(k, 0, n);
    return k == n ? 0 : k;
}

PathPoint path_in_segment(const LoopSpec& spec, double t, int segment) {
    PathPoint p;
    p.t = t;
    p.theta = spec.omega() * t + spec.theta0;
    p.kappa = noise_value(spec.seed, spec.noise_intensity, segment);
    const double rr = spec.radius * (1 + p.kappa);
    p.delta = rr * std::sin(p.theta);
    p.j = spec.j_center + rr * std::cos(p.theta);
    return p;
}

PathPoint path_at(const LoopSpec& spec, double t) {
    if (!(t >= 0 && t <= spec.period))
        throw Error(ErrorCode::OutOfRange, "time outside [0, T]", "t", t);
    return path_in_segment(spec, t, segment_of(spec, t));
}

PathRate rate_in_segment(const LoopSpec& spec, double t, int segment) {
    const double w = spec.omega();
    const double th = w * t + spec.theta0;
    const double rr = spec.radius * (1 + noise_value(spec.seed, spec.noise_intensity, segment));
    return {rr * w * std::cos(th), -rr * w * std::sin(th)};
}

std::vector<double> noise_breakpoints(const LoopSpec& spec) {
    std::vector<double> out;
    if (spec.noise_intensity == 0) return out;
    for (int k = 1; k < spec.noise_segments; ++k)
        out.push_back(spec.period * k / spec.noise_segments);
    return out;
}

}  // namespace epdyn
