#include "epdyn/scenario.hpp"

#include <cmath>

#include "epdyn/error.hpp"
#include "epdyn/evolve.hpp"

namespace epdyn {

const char* to_string(InitialKind k) {
    switch (k) {
        case InitialKind::ALPHA: return "ALPHA";
        case InitialKind::BETA: return "BETA";
        case InitialKind::CUSTOM: return "CUSTOM";
    }
    return "?";
}

CVec2 resolve_initial(const HamiltonianSpec& hspec, const LoopSpec& lspec,
                      const InitialState& init) {
    switch (init.kind) {
        case InitialKind::ALPHA: return initial_eigenstates(hspec, lspec).first;
        case InitialKind::BETA: return initial_eigenstates(hspec, lspec).second;
        case InitialKind::CUSTOM: break;
    }
    const double n = init.custom.norm();
    if (!(n > 0) || !std::isfinite(n))
        throw Error(ErrorCode::Validation, "initial state must be a nonzero finite vector",
                    "initial_state");
    return cplx(1.0 / n) * init.custom;
}

std::string preset_name(int k, bool apt) {
    return (apt ? "apt-trajectory-" : "trajectory-") + std::to_string(k);
}

std::optional<std::pair<int, bool>> parse_preset_name(const std::string& name) {
    for (bool apt : {false, true})
        for (int k = 1; k <= 8; ++k)
            if (name == preset_name(k, apt)) return std::make_pair(k, apt);
    return std::nullopt;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (bool apt : {false, true})
        for (int k = 1; k <= 8; ++k) out.push_back(preset_name(k, apt));
    return out;
}

Scenario preset(const std::string& name) {
    const auto parsed = parse_preset_name(name);
    if (!parsed) throw Error(ErrorCode::Validation, "unknown preset '" + name + "'", "preset");
    const auto [k, apt] = *parsed;
    Scenario s;
    s.name = name;
    s.hamiltonian.family = apt ? Family::APT_PASSIVE : Family::PT_PASSIVE;
    s.hamiltonian.gamma = 0.06;
    s.loop.theta0 = k <= 4 ? 0.0 : kPi;
    s.loop.direction = k % 2 == 1 ? Direction::CW : Direction::CCW;
    const int m = (k - 1) % 4;
    s.initial.kind = m < 2 ? InitialKind::ALPHA : InitialKind::BETA;
    return s;
}

}  // namespace epdyn
