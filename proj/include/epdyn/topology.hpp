#pragma once

// Winding numbers along the traversed loop.
//
//   spectral:  V   = -(1/2 pi) * total change of arg(E+ - E-),  E+- = eigenvalues of H
//   dynamic:   V_D = same for the transported-frame eigenvalues of h_tilde
//
// The gap is 2 sqrt(X) with X = lambda^2 (spectral) or lambda^2 - f^2
// (dynamic), so the gap winds half as often as X. Arguments are unwrapped on
// a sample grid that is bisected until every step changes arg X by less than
// pi/2.

#include <iosfwd>
#include <vector>

#include "epdyn/loop.hpp"
#include "epdyn/model.hpp"

namespace epdyn {

struct VorticityOptions {
    double ep_tolerance = 1e-9;
    double quantization_tolerance = 1e-3;
    int max_depth = 24;  ///< bisection levels allowed per grid step
};

struct VorticityResult {
    double raw = 0;
    double quantized = 0;  ///< nearest half-integer
    double residual = 0;   ///< |raw - quantized|
    int enclosed_eps = 0;
    double gap_min = 0;    ///< min |gap| on the samples, 1/us
    bool quantized_ok = false;
};

/// One row of the optional winding trace.
struct WindingSample {
    double t = 0;
    double theta = 0;
    cplx gap{};
    double unwrapped_arg = 0;  ///< unwrapped arg of the gap, rad
};

/// Throws GapCollapse when |gap| < ep_tolerance, RefinementLimit when the
/// phase step cannot be resolved. grid >= 256.
VorticityResult spectral_vorticity(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                                   int grid = 1024, const VorticityOptions& opts = {},
                                   std::vector<WindingSample>* trace = nullptr);

/// As spectral_vorticity for E+ - E- = 2 sqrt(lambda^2 - f^2), direction and
/// noise aware. Throws EffectiveGapCollapse when that gap closes.
VorticityResult dynamic_vorticity(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                                  int grid = 1024, const VorticityOptions& opts = {},
                                  std::vector<WindingSample>* trace = nullptr);

/// EPs (0, +-gamma) strictly inside the noise-free loop, counted by the
/// winding of the vector from each EP to the path. Throws EPOnPath when an EP
/// lies within ep_tolerance of the path.
int enclosed_ep_count(const LoopSpec& lspec, double gamma, double ep_tolerance = 1e-9);

void write_winding_csv(std::ostream& out, const std::vector<WindingSample>& trace);

}  // namespace epdyn
