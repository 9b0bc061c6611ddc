// epdyn command-line tool.
//
//   epdyn encircle  --config scenario.json [--out dir] [--seed n]
//   epdyn preset    <name> [--out dir] [--seed n]   (--list names, --show config)
//   epdyn sweep     --config sweep.json [--out dir] [--workers n] [--seed n]
//   epdyn vorticity --config scenario.json [--out dir] [--seed n]
//   epdyn classify  [--config scenario.json] [--out dir] [--workers n]
//   epdyn riemann   [--config scenario.json] [--out dir] [--resolution n]
//
// Exit status: 0 success, 2 invalid input, 3 numeric failure. Failures print
// an error JSON to stderr and, when possible, to <out>/error.json.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "epdyn/error.hpp"
#include "epdyn/pipeline.hpp"

using namespace epdyn;

namespace {

struct Flags {
    std::string config;
    std::string out;
    int workers = 1;
    std::optional<std::uint64_t> seed;
};

Json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::Validation, "cannot read config file '" + path + "'", "config");
    try {
        return Json::parse(f);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::Validation, std::string("config is not valid JSON: ") + e.what(),
                    "config");
    }
}

ScenarioConfig load_config(const Flags& fl) {
    ScenarioConfig c = config_from_json(fl.config.empty() ? Json::object() : read_json(fl.config));
    if (fl.seed) c.scenario.loop.seed = *fl.seed;
    if (!fl.out.empty()) c.outputs = fl.out;
    c.validate();
    return c;
}

void write_json(const std::string& dir, const char* name, const Json& j) {
    std::filesystem::create_directories(dir);
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    f << j.dump(2) << "\n";
}

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::Validation:
        case ErrorCode::MissingCustomMatrix:
        case ErrorCode::OutOfRange:
        case ErrorCode::UnsupportedFamily:
            return 2;
        default:
            return 3;
    }
}

int fail(const std::string& out, const std::string& code, const std::string& msg,
         const std::string& field, double value, int status) {
    const Json j = error_json(code, msg, field, value);
    std::cerr << j.dump() << "\n";
    if (!out.empty()) {
        try {
            write_json(out, "error.json", j);
        } catch (...) {
        }
    }
    return status;
}

int cmd_encircle(const ScenarioConfig& c) {
    const ScenarioResult r = run_scenario(c);
    write_outputs(r, c, c.outputs);
    std::cout << (std::filesystem::path(c.outputs) / "summary.json").string() << "\n";
    return 0;
}

int cmd_sweep(const Flags& fl) {
    if (fl.config.empty()) throw Error(ErrorCode::Validation, "sweep needs --config", "config");
    Json j = read_json(fl.config);
    SweepSpec spec = sweep_from_json(j);
    if (fl.seed) spec.base.scenario.loop.seed = *fl.seed;
    const std::string out = fl.out.empty() ? spec.base.outputs : fl.out;
    const std::vector<SweepRow> rows = run_sweep(spec, fl.workers);
    std::filesystem::create_directories(out);
    std::ofstream f(std::filesystem::path(out) / "sweep.csv", std::ios::binary);
    write_sweep_csv(f, spec, rows);
    std::cout << (std::filesystem::path(out) / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_vorticity(const ScenarioConfig& c) {
    std::vector<WindingSample> trace;
    const HamiltonianSpec& h = c.scenario.hamiltonian;
    const LoopSpec& l = c.scenario.loop;
    dynamic_vorticity(h, l, 1024, {}, &trace);
    Json j = vorticity_json(h, l);
    write_json(c.outputs, "vorticity.json", j);
    std::ofstream f(std::filesystem::path(c.outputs) / "winding.csv", std::ios::binary);
    write_winding_csv(f, trace);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_classify(const Flags& fl) {
    if (!fl.config.empty()) {
        ScenarioConfig c = load_config(fl);
        c.emit = {Emit::CLASSIFICATION};
        const ScenarioResult r = run_scenario(c);
        Json j = r.summary.contains("classification") ? r.summary["classification"] : Json::object();
        write_json(c.outputs, "classification.json", j);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    const std::string out = fl.out.empty() ? "out" : fl.out;
    const Json j = table_json(reproduce_table());
    write_json(out, "table.json", j);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_riemann(const ScenarioConfig& c, int resolution) {
    const double g = std::max(c.scenario.hamiltonian.gamma, 1e-3);
    const auto mesh = riemann_mesh(c.scenario.hamiltonian, {-2 * g, 2 * g, 0.0, 2 * g}, resolution);
    std::filesystem::create_directories(c.outputs);
    const auto path = std::filesystem::path(c.outputs) / "riemann.csv";
    std::ofstream f(path, std::ios::binary);
    write_mesh_csv(f, mesh);
    std::cout << path.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamical encircling of exceptional points in a dissipative qubit"};
    app.require_subcommand(1);
    Flags fl;
    auto common = [&](CLI::App* sub, bool workers) {
        sub->add_option("--config", fl.config, "JSON configuration file");
        sub->add_option("--out", fl.out, "output directory");
        sub->add_option("--seed", fl.seed, "noise seed (overrides loop.seed)");
        if (workers) sub->add_option("--workers", fl.workers, "worker threads")->check(CLI::PositiveNumber);
    };
    CLI::App* encircle = app.add_subcommand("encircle", "propagate one scenario");
    common(encircle, false);
    CLI::App* sweep = app.add_subcommand("sweep", "parameter grid");
    common(sweep, true);
    CLI::App* vort = app.add_subcommand("vorticity", "spectral and dynamic vorticity");
    common(vort, false);
    CLI::App* classify = app.add_subcommand("classify", "chirality and reciprocity");
    common(classify, true);
    CLI::App* riemann = app.add_subcommand("riemann", "eigenvalue mesh for surface plots");
    common(riemann, false);
    int resolution = 65;
    riemann->add_option("--resolution", resolution, "points per axis (>= 8)");
    CLI::App* pre = app.add_subcommand("preset", "run a built-in trajectory");
    common(pre, false);
    std::string preset_arg;
    bool list = false, show = false;
    pre->add_option("name", preset_arg, "preset name");
    pre->add_flag("--list", list, "print the preset names");
    pre->add_flag("--show", show, "print the preset configuration instead of running it");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail(fl.out, "Validation", e.what(), "arguments", std::nan(""), 2);
    }

    try {
        if (*encircle) return cmd_encircle(load_config(fl));
        if (*sweep) return cmd_sweep(fl);
        if (*vort) return cmd_vorticity(load_config(fl));
        if (*classify) return cmd_classify(fl);
        if (*riemann) return cmd_riemann(load_config(fl), resolution);
        if (*pre) {
            if (list) {
                for (const std::string& n : preset_names()) std::cout << n << "\n";
                return 0;
            }
            if (preset_arg.empty()) throw Error(ErrorCode::Validation, "preset needs a name", "preset");
            if (show) {
                std::cout << to_json(preset(preset_arg)).dump(2) << "\n";
                return 0;
            }
            Json j;
            j["preset"] = preset_arg;
            j["outputs"] = fl.out.empty() ? "out/" + preset_arg : fl.out;
            ScenarioConfig c = config_from_json(j);
            if (fl.seed) c.scenario.loop.seed = *fl.seed;
            return cmd_encircle(c);
        }
    } catch (const Error& e) {
        return fail(fl.out, to_string(e.code()), e.what(), e.field(), e.value(), status_for(e.code()));
    } catch (const std::exception& e) {
        return fail(fl.out, "Internal", e.what(), "", std::nan(""), 3);
    }
    return 0;
}
