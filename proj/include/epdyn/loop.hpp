#pragma once

// Encircling path in (D, J) parameter space:
//
//   D(t) = r (1 + kappa(t)) sin(w t + theta0)
//   J(t) = J0 + r (1 + kappa(t)) cos(w t + theta0)
//
// with w = +2 pi / T for clockwise and -2 pi / T for counterclockwise
// traversal. kappa(t) is piecewise constant over `noise_segments` equal
// subintervals, drawn uniformly from [-ir, ir] by splitmix64.

#include <cstdint>
#include <string>
#include <vector>

namespace epdyn {

enum class Direction { CW, CCW };

const char* to_string(Direction d);

struct LoopSpec {
    double j_center = 0.06;    ///< J0, 1/us
    double radius = 0.03;      ///< r, 1/us
    double theta0 = 0.0;       ///< 0 starts at J0 + r, pi at J0 - r
    Direction direction = Direction::CW;
    double period = 250.0;     ///< T, us
    int samples = 1001;        ///< dense output grid size
    double noise_intensity = 0.0;  ///< ir
    std::uint64_t seed = 0;
    int noise_segments = 100;

    double omega() const;
    /// Throws Validation naming the first offending field ("loop.<name>").
    void validate() const;
};

struct PathPoint {
    double t = 0;      ///< us
    double theta = 0;  ///< w t + theta0, rad (not wrapped)
    double delta = 0;  ///< 1/us
    double j = 0;      ///< 1/us
    double kappa = 0;
};

/// Time derivatives of (D, J) inside one noise segment.
struct PathRate {
    double delta_dot = 0;
    double j_dot = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// kappa for one segment: uniform in [-ir, ir) from the splitmix64 stream
/// seeded with `seed`, read at position `segment`.
double noise_value(std::uint64_t seed, double ir, int segment);

std::vector<double> noise_sequence(std::uint64_t seed, double ir, int segments);

/// Segment index of time t; t = T wraps to segment 0 so the loop closes.
int segment_of(const LoopSpec& spec, double t);

/// Throws OutOfRange unless 0 <= t <= period.
PathPoint path_at(const LoopSpec& spec, double t);

/// Point at time t evaluated with the noise of an explicit segment. Used by
/// integrators that must stay on one side of a noise jump.
PathPoint path_in_segment(const LoopSpec& spec, double t, int segment);

/// Analytic (D', J') within a segment; kappa jumps contribute nothing.
PathRate rate_in_segment(const LoopSpec& spec, double t, int segment);

/// Times at which kappa jumps, strictly inside (0, T). Empty when noise-free.
std::vector<double> noise_breakpoints(const LoopSpec& spec);

}  // namespace epdyn
