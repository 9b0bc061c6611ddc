#include "epdyn/io.hpp"

#include <cmath>
#include <cstdio>

#include "epdyn/error.hpp"

namespace epdyn {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::Validation, field + " " + what, field);
}

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) bad(where.empty() ? "config" : where, "must be an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        if (!known) bad(where.empty() ? item.key() : where + "." + item.key(), "is not a known field");
    }
}

double number(const Json& j, const std::string& field) {
    if (!j.is_number()) bad(field, "must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) bad(field, "must be finite");
    return v;
}

long long integer(const Json& j, const std::string& field) {
    if (!j.is_number_integer()) bad(field, "must be an integer");
    return j.get<long long>();
}

std::string text(const Json& j, const std::string& field) {
    if (!j.is_string()) bad(field, "must be a string");
    return j.get<std::string>();
}

cplx complex_from(const Json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 2) bad(field, "must be [re, im]");
    return {number(j[0], field), number(j[1], field)};
}

Json complex_to(cplx z) { return Json::array({z.real(), z.imag()}); }

Emit emit_from(const std::string& s, const std::string& field) {
    for (Emit e : {Emit::TRAJECTORY, Emit::R_SERIES, Emit::VORTICITY, Emit::CLASSIFICATION,
                   Emit::RIEMANN_MESH})
        if (s == to_string(e)) return e;
    bad(field, "has unknown value '" + s + "'");
}

void read_hamiltonian(const Json& j, HamiltonianSpec& h) {
    check_keys(j, "hamiltonian", {"family", "gamma", "custom_matrix"});
    if (j.contains("family")) h.family = family_from_string(text(j["family"], "hamiltonian.family"));
    if (j.contains("gamma")) h.gamma = number(j["gamma"], "hamiltonian.gamma");
    if (j.contains("custom_matrix")) {
        const Json& m = j["custom_matrix"];
        const std::string f = "hamiltonian.custom_matrix";
        if (!m.is_array() || m.size() != 4) bad(f, "must list 4 entries [re, im], row-major");
        h.custom_matrix = CMat2{complex_from(m[0], f), complex_from(m[1], f),
                                complex_from(m[2], f), complex_from(m[3], f)};
    }
}

void read_loop(const Json& j, LoopSpec& l) {
    check_keys(j, "loop", {"j_center", "radius", "theta0", "direction", "period", "samples",
                           "noise_intensity", "seed", "noise_segments"});
    if (j.contains("j_center")) l.j_center = number(j["j_center"], "loop.j_center");
    if (j.contains("radius")) l.radius = number(j["radius"], "loop.radius");
    if (j.contains("theta0")) l.theta0 = number(j["theta0"], "loop.theta0");
    if (j.contains("direction")) {
        const std::string d = text(j["direction"], "loop.direction");
        if (d == "CW") l.direction = Direction::CW;
        else if (d == "CCW") l.direction = Direction::CCW;
        else bad("loop.direction", "must be CW or CCW");
    }
    if (j.contains("period")) l.period = number(j["period"], "loop.period");
    if (j.contains("samples")) l.samples = static_cast<int>(integer(j["samples"], "loop.samples"));
    if (j.contains("noise_intensity"))
        l.noise_intensity = number(j["noise_intensity"], "loop.noise_intensity");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
            bad("loop.seed", "must be a nonnegative integer");
        l.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("noise_segments"))
        l.noise_segments = static_cast<int>(integer(j["noise_segments"], "loop.noise_segments"));
}

void read_initial(const Json& j, InitialState& s) {
    if (j.is_string()) {
        const std::string k = j.get<std::string>();
        if (k == "ALPHA") s.kind = InitialKind::ALPHA;
        else if (k == "BETA") s.kind = InitialKind::BETA;
        else bad("initial_state", "must be ALPHA, BETA or {\"custom\": [[re, im], [re, im]]}");
        return;
    }
    check_keys(j, "initial_state", {"custom"});
    const Json& v = j.contains("custom") ? j["custom"] : Json();
    if (!v.is_array() || v.size() != 2) bad("initial_state.custom", "must be [[re, im], [re, im]]");
    s.kind = InitialKind::CUSTOM;
    s.custom = {complex_from(v[0], "initial_state.custom"), complex_from(v[1], "initial_state.custom")};
}

}  // namespace

const char* to_string(Emit e) {
    switch (e) {
        case Emit::TRAJECTORY: return "trajectory";
        case Emit::R_SERIES: return "r_series";
        case Emit::VORTICITY: return "vorticity";
        case Emit::CLASSIFICATION: return "classification";
        case Emit::RIEMANN_MESH: return "riemann_mesh";
    }
    return "?";
}

void ScenarioConfig::validate() const {
    const HamiltonianSpec& h = scenario.hamiltonian;
    if (!(h.gamma >= 0) || !std::isfinite(h.gamma)) bad("hamiltonian.gamma", "must be >= 0");
    if (h.family == Family::CUSTOM && !h.custom_matrix)
        throw Error(ErrorCode::MissingCustomMatrix, "CUSTOM family needs hamiltonian.custom_matrix",
                    "hamiltonian.custom_matrix");
    if (h.family == Family::CUSTOM && !h.custom_matrix->finite())
        bad("hamiltonian.custom_matrix", "must be finite");
    scenario.loop.validate();
    if (scenario.initial.kind == InitialKind::CUSTOM) {
        const CVec2& v = scenario.initial.custom;
        if (!v.finite() || !(v.norm() > 0)) bad("initial_state.custom", "must be nonzero and finite");
    }
    if (outputs.empty()) bad("outputs", "must not be empty");
}

ScenarioConfig config_from_json(const Json& j) {
    check_keys(j, "", {"name", "preset", "hamiltonian", "loop", "initial_state", "outputs", "emit"});
    ScenarioConfig c;
    if (j.contains("preset")) c.scenario = preset(text(j["preset"], "preset"));
    if (j.contains("name")) c.scenario.name = text(j["name"], "name");
    if (c.scenario.name.empty()) c.scenario.name = "custom";
    if (j.contains("hamiltonian")) read_hamiltonian(j["hamiltonian"], c.scenario.hamiltonian);
    if (j.contains("loop")) read_loop(j["loop"], c.scenario.loop);
    if (j.contains("initial_state")) read_initial(j["initial_state"], c.scenario.initial);
    if (j.contains("outputs")) c.outputs = text(j["outputs"], "outputs");
    if (j.contains("emit")) {
        if (!j["emit"].is_array()) bad("emit", "must be an array");
        c.emit.clear();
        for (const Json& e : j["emit"]) c.emit.insert(emit_from(text(e, "emit"), "emit"));
    }
    c.validate();
    return c;
}

Json to_json(const HamiltonianSpec& h) {
    Json j;
    j["family"] = to_string(h.family);
    j["gamma"] = h.gamma;
    if (h.custom_matrix) {
        const CMat2& m = *h.custom_matrix;
        j["custom_matrix"] = Json::array(
            {complex_to(m.m00), complex_to(m.m01), complex_to(m.m10), complex_to(m.m11)});
    }
    return j;
}

Json to_json(const LoopSpec& l) {
    Json j;
    j["j_center"] = l.j_center;
    j["radius"] = l.radius;
    j["theta0"] = l.theta0;
    j["direction"] = to_string(l.direction);
    j["period"] = l.period;
    j["samples"] = l.samples;
    j["noise_intensity"] = l.noise_intensity;
    j["seed"] = l.seed;
    j["noise_segments"] = l.noise_segments;
    return j;
}

Json to_json(const InitialState& s) {
    if (s.kind != InitialKind::CUSTOM) return to_string(s.kind);
    Json j;
    j["custom"] = Json::array({complex_to(s.custom.a0), complex_to(s.custom.a1)});
    return j;
}

Json to_json(const Scenario& s) {
    Json j;
    j["name"] = s.name;
    j["hamiltonian"] = to_json(s.hamiltonian);
    j["loop"] = to_json(s.loop);
    j["initial_state"] = to_json(s.initial);
    return j;
}

Json config_to_json(const ScenarioConfig& c) {
    Json j = to_json(c.scenario);
    j["outputs"] = c.outputs;
    Json e = Json::array();
    for (Emit x : c.emit) e.push_back(to_string(x));
    j["emit"] = e;
    return j;
}

Json error_json(const std::string& code, const std::string& message, const std::string& field,
                double value) {
    Json e;
    e["code"] = code;
    e["message"] = message;
    e["field"] = field.empty() ? Json() : Json(field);
    e["value"] = std::isfinite(value) ? Json(value) : Json();
    Json j;
    j["error"] = e;
    return j;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace epdyn
