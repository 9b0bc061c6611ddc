#pragma once

// Encircling scenarios: Hamiltonian, loop and initial state, plus the 16
// named trajectories.
//
//   trajectory-k       PT_PASSIVE, k = 1..8
//   apt-trajectory-k   APT_PASSIVE, k = 1..8
//
// k = 1..4 start at theta0 = 0 (J = J0 + r), k = 5..8 at theta0 = pi.
// Odd k run clockwise; k = 1, 2, 5, 6 start in alpha and 3, 4, 7, 8 in beta.

#include <optional>
#include <string>
#include <vector>

#include "epdyn/core.hpp"
#include "epdyn/loop.hpp"
#include "epdyn/model.hpp"

namespace epdyn {

enum class InitialKind { ALPHA, BETA, CUSTOM };

const char* to_string(InitialKind k);

struct InitialState {
    InitialKind kind = InitialKind::ALPHA;
    CVec2 custom{1.0, 0.0};  ///< (a0, a1), used for CUSTOM
};

struct Scenario {
    std::string name;
    HamiltonianSpec hamiltonian;
    LoopSpec loop;
    InitialState initial;
};

/// Normalized psi(0). Throws Validation for a zero custom vector.
CVec2 resolve_initial(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                      const InitialState& init);

std::vector<std::string> preset_names();

/// Throws Validation naming "preset" for an unknown name.
Scenario preset(const std::string& name);

/// Trajectory number 1..8 and family of a preset name, if it is one.
std::optional<std::pair<int, bool>> parse_preset_name(const std::string& name);

std::string preset_name(int k, bool apt);

}  // namespace epdyn
