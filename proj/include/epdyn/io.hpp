#pragma once

// JSON scenario configuration and report serialization.
//
// A configuration is one JSON object:
//
//   {
//     "preset": "trajectory-1",             optional starting point
//     "hamiltonian": {"family": "PT_PASSIVE", "gamma": 0.06,
//                     "custom_matrix": [[re, im], [re, im], [re, im], [re, im]]},
//     "loop": {"j_center": 0.06, "radius": 0.03, "theta0": 0, "direction": "CW",
//              "period": 250, "samples": 1001, "noise_intensity": 0, "seed": 0,
//              "noise_segments": 100},
//     "initial_state": "ALPHA" | "BETA" | {"custom": [[re, im], [re, im]]},
//     "outputs": "out",
//     "emit": ["trajectory", "r_series", "vorticity", "classification", "riemann_mesh"]
//   }
//
// Every key is optional; absent keys keep the preset (or default) value.
// Unknown keys and wrong types are rejected with the dotted field name.

#include <set>
#include <string>

#include "epdyn/scenario.hpp"
#include "json.hpp"

namespace epdyn {

using Json = nlohmann::ordered_json;

enum class Emit { TRAJECTORY, R_SERIES, VORTICITY, CLASSIFICATION, RIEMANN_MESH };

const char* to_string(Emit e);

struct ScenarioConfig {
    Scenario scenario;
    std::string outputs = "out";
    std::set<Emit> emit{Emit::TRAJECTORY, Emit::R_SERIES, Emit::VORTICITY, Emit::CLASSIFICATION};

    /// Throws Validation naming the first offending field.
    void validate() const;
};

/// Parse and validate. Throws Validation.
ScenarioConfig config_from_json(const Json& j);
Json config_to_json(const ScenarioConfig& c);

Json to_json(const HamiltonianSpec& h);
Json to_json(const LoopSpec& l);
Json to_json(const InitialState& s);
Json to_json(const Scenario& s);

/// Error object {"error": {"code", "message", "field", "value"}}.
Json error_json(const std::string& code, const std::string& message, const std::string& field,
                double value);

/// Number formatting used in every CSV file: 17 significant digits.
std::string fmt(double x);

}  // namespace epdyn
