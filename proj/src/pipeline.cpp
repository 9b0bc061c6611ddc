#include "epdyn/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "epdyn/error.hpp"

namespace epdyn {

namespace {

Json transitions_json(const std::vector<TransitionEvent>& events) {
    Json a = Json::array();
    for (const TransitionEvent& e : events) {
        Json x;
        x["t_us"] = e.t;
        x["kind"] = to_string(e.kind);
        a.push_back(x);
    }
    return a;
}

Json chirality_json(const ChiralityReport& r) {
    Json j;
    j["anticommutator_residual"] = r.anticommutator_residual;
    j["tolerance"] = r.tolerance;
    j["predicted_chiral"] = r.predicted_chiral;
    j["operator_used"] = r.operator_used;
    return j;
}

Json reciprocity_json(const ReciprocityReport& r) {
    Json j;
    j["sz_expectation"] = r.sz_expectation;
    j["gated"] = r.gated;
    j["sz_derivative"] = r.gated ? Json(r.sz_derivative) : Json();
    j["analytic_rate"] = r.analytic_rate;
    j["predicted_reciprocal"] = r.predicted_reciprocal;
    j["operator_used"] = r.operator_used;
    return j;
}

Json evidence_json(const RunEvidence& e) {
    Json j;
    j["initial_state"] = e.initial_state == 0 ? "ALPHA" : "BETA";
    j["final_state"] = e.final_state == 0 ? "ALPHA" : "BETA";
    j["final_fidelity_alpha"] = e.final_fidelity_alpha;
    j["final_fidelity_beta"] = e.final_fidelity_beta;
    j["crossings"] = e.crossings;
    return j;
}

std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

void apply_axis(SweepAxis axis, double v, ScenarioConfig& c, std::uint64_t& base_seed) {
    switch (axis) {
        case SweepAxis::PERIOD: c.scenario.loop.period = v; break;
        case SweepAxis::RADIUS: c.scenario.loop.radius = v; break;
        case SweepAxis::NOISE_INTENSITY: c.scenario.loop.noise_intensity = v; break;
        case SweepAxis::SEED: base_seed = static_cast<std::uint64_t>(v); break;
    }
}

SweepRow run_cell(const SweepSpec& spec, std::size_t index) {
    const std::size_t n2 = spec.axis2 ? spec.values2.size() : 1;
    SweepRow row;
    row.index = index;
    row.value1 = spec.values1[index / n2];
    row.value2 = spec.axis2 ? spec.values2[index % n2] : 0.0;
    ScenarioConfig c = spec.base;
    std::uint64_t base_seed = c.scenario.loop.seed;
    apply_axis(spec.axis1, row.value1, c, base_seed);
    if (spec.axis2) apply_axis(*spec.axis2, row.value2, c, base_seed);
    row.seed = base_seed ^ splitmix64(index);
    c.scenario.loop.seed = row.seed;
    try {
        c.validate();
        const HamiltonianSpec& h = c.scenario.hamiltonian;
        const LoopSpec& l = c.scenario.loop;
        const CVec2 psi0 = resolve_initial(h, l, c.scenario.initial);
        const TrajectoryRecord traj = propagate(h, l, psi0, l.samples);
        std::tie(row.fidelity_alpha, row.fidelity_beta) =
            transfer_fidelity(traj, {traj.alpha0, traj.beta0});
        row.tau_ratio = adiabaticity(h, l).ratio;
        row.crossings = static_cast<int>(detect_transitions(traj, row.tau_ratio).size());
        row.vorticity = dynamic_vorticity(h, l).quantized;
    } catch (const Error& e) {
        row.error = std::string(to_string(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    switch (spec.metric) {
        case SweepMetric::FIDELITY_ALPHA: row.metric = row.fidelity_alpha; break;
        case SweepMetric::FIDELITY_BETA: row.metric = row.fidelity_beta; break;
        case SweepMetric::CROSSINGS: row.metric = row.crossings; break;
        case SweepMetric::VORTICITY: row.metric = row.vorticity; break;
    }
    return row;
}

SweepAxis axis_from(const std::string& s, const std::string& field) {
    for (SweepAxis a : {SweepAxis::PERIOD, SweepAxis::RADIUS, SweepAxis::NOISE_INTENSITY,
                        SweepAxis::SEED})
        if (s == to_string(a)) return a;
    throw Error(ErrorCode::Validation, field + " must be PERIOD, RADIUS, NOISE_INTENSITY or SEED",
                field);
}

void read_axis(const Json& j, const std::string& field, SweepAxis& axis, std::vector<double>& values) {
    if (!j.is_object() || !j.contains("name") || !j.contains("values") || !j["name"].is_string() ||
        !j["values"].is_array())
        throw Error(ErrorCode::Validation, field + " must be {\"name\": ..., \"values\": [...]}",
                    field);
    axis = axis_from(j["name"].get<std::string>(), field + ".name");
    values.clear();
    for (const Json& v : j["values"]) {
        if (!v.is_number())
            throw Error(ErrorCode::Validation, field + ".values must be numbers", field + ".values");
        values.push_back(v.get<double>());
    }
}

}  // namespace

Json vorticity_json(const HamiltonianSpec& hspec, const LoopSpec& lspec) {
    const VorticityResult d = dynamic_vorticity(hspec, lspec);
    const VorticityResult s = spectral_vorticity(hspec, lspec);
    Json j;
    j["dynamic_raw"] = d.raw;
    j["dynamic_quantized"] = d.quantized;
    j["dynamic_residual"] = d.residual;
    j["spectral_raw"] = s.raw;
    j["spectral_quantized"] = s.quantized;
    j["enclosed_eps"] = d.enclosed_eps;
    j["effective_gap_min"] = d.gap_min;
    j["gap_min"] = s.gap_min;
    j["quantized_ok"] = d.quantized_ok;
    return j;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
    config.validate();
    const Scenario& sc = config.scenario;
    const HamiltonianSpec& h = sc.hamiltonian;
    const LoopSpec& l = sc.loop;
    const CVec2 psi0 = resolve_initial(h, l, sc.initial);

    ScenarioResult out;
    out.trajectory = propagate(h, l, psi0, l.samples);
    const auto [fa, fb] = transfer_fidelity(out.trajectory, {out.trajectory.alpha0, out.trajectory.beta0});

    Json& s = out.summary;
    s["scenario"] = to_json(sc);
    s["fidelity_alpha"] = fa;
    s["fidelity_beta"] = fb;
    s["final_state"] = fb > fa ? "BETA" : "ALPHA";
    s["final_log_norm"] = out.trajectory.final().raw_log_norm;

    if (!is_parametric_family(h.family)) return out;

    const AdiabaticityReport adi = adiabaticity(h, l);
    s["tau_crit"] = adi.tau_crit;
    s["tau_ratio"] = adi.ratio;
    const std::vector<TransitionEvent> events = detect_transitions(out.trajectory, adi.ratio);
    s["crossings"] = events.size();
    s["crossing_events"] = transitions_json(events);

    if (config.emit.count(Emit::R_SERIES)) {
        const RWhich which = sc.initial.kind == InitialKind::BETA ? RWhich::R2 : RWhich::R1;
        out.r_series = integrate_R(h, l, which, l.samples);
        Json r;
        r["which"] = to_string(which);
        r["unit_crossings"] = out.r_series->crossings.size();
        s["r_series"] = r;
    }
    if (config.emit.count(Emit::VORTICITY)) {
        const VorticityResult d = dynamic_vorticity(h, l, 1024, {}, &out.winding);
        s["dynamic_vorticity"] = d.quantized;
        s["vorticity"] = vorticity_json(h, l);
    }
    if (config.emit.count(Emit::CLASSIFICATION)) {
        Json c;
        c["chirality"] = chirality_json(chirality_test(frame_at(h, l, 0.0).h_tilde));
        c["reciprocity"] = reciprocity_json(reciprocity_test(psi0, h, l));
        s["classification"] = c;
    }
    return out;
}

void write_outputs(const ScenarioResult& result, const ScenarioConfig& config,
                   const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw Error(ErrorCode::Validation, std::string("cannot write ") + name, "outputs");
        return f;
    };
    {
        std::ofstream f = open("summary.json");
        f << result.summary.dump(2) << "\n";
    }
    if (config.emit.count(Emit::TRAJECTORY)) {
        std::ofstream f = open("trajectory.csv");
        write_trajectory_csv(f, result.trajectory);
    }
    if (result.r_series) {
        std::ofstream f = open("r_series.csv");
        write_r_series_csv(f, *result.r_series);
    }
    if (!result.winding.empty()) {
        std::ofstream f = open("winding.csv");
        write_winding_csv(f, result.winding);
    }
    if (config.emit.count(Emit::RIEMANN_MESH)) {
        const double g = std::max(config.scenario.hamiltonian.gamma, 1e-3);
        std::ofstream f = open("riemann.csv");
        write_mesh_csv(f, riemann_mesh(config.scenario.hamiltonian, {-2 * g, 2 * g, 0.0, 2 * g}, 65));
    }
}

const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::PERIOD: return "PERIOD";
        case SweepAxis::RADIUS: return "RADIUS";
        case SweepAxis::NOISE_INTENSITY: return "NOISE_INTENSITY";
        case SweepAxis::SEED: return "SEED";
    }
    return "?";
}

const char* to_string(SweepMetric m) {
    switch (m) {
        case SweepMetric::FIDELITY_ALPHA: return "fidelity_alpha";
        case SweepMetric::FIDELITY_BETA: return "fidelity_beta";
        case SweepMetric::CROSSINGS: return "crossings";
        case SweepMetric::VORTICITY: return "vorticity";
    }
    return "?";
}

void SweepSpec::validate() const {
    base.validate();
    if (values1.empty()) throw Error(ErrorCode::Validation, "axis1.values must not be empty", "axis1.values");
    if (axis2 && values2.empty())
        throw Error(ErrorCode::Validation, "axis2.values must not be empty", "axis2.values");
    if (axis2 && *axis2 == axis1)
        throw Error(ErrorCode::Validation, "axis2 must differ from axis1", "axis2.name");
    auto check = [](SweepAxis a, const std::vector<double>& v, const std::string& field) {
        for (double x : v) {
            const bool ok = a == SweepAxis::SEED ? (x >= 0 && x == std::floor(x) && x < 0x1p64)
                          : a == SweepAxis::NOISE_INTENSITY ? x >= 0
                                                            : x > 0;
            if (!ok || !std::isfinite(x))
                throw Error(ErrorCode::Validation, field + " has an invalid value", field, x);
        }
    };
    check(axis1, values1, "axis1.values");
    if (axis2) check(*axis2, values2, "axis2.values");
}

SweepSpec sweep_from_json(const Json& j) {
    if (!j.is_object()) throw Error(ErrorCode::Validation, "sweep must be an object", "sweep");
    for (const auto& item : j.items())
        if (item.key() != "base" && item.key() != "axis1" && item.key() != "axis2" &&
            item.key() != "metric")
            throw Error(ErrorCode::Validation, item.key() + " is not a known field", item.key());
    SweepSpec s;
    s.base = config_from_json(j.contains("base") ? j["base"] : Json::object());
    if (!j.contains("axis1")) throw Error(ErrorCode::Validation, "axis1 is required", "axis1");
    read_axis(j["axis1"], "axis1", s.axis1, s.values1);
    if (j.contains("axis2")) {
        SweepAxis a;
        read_axis(j["axis2"], "axis2", a, s.values2);
        s.axis2 = a;
    }
    if (j.contains("metric")) {
        const std::string m = j["metric"].is_string() ? j["metric"].get<std::string>() : "";
        bool found = false;
        for (SweepMetric x : {SweepMetric::FIDELITY_ALPHA, SweepMetric::FIDELITY_BETA,
                              SweepMetric::CROSSINGS, SweepMetric::VORTICITY})
            if (m == to_string(x)) {
                s.metric = x;
                found = true;
            }
        if (!found)
            throw Error(ErrorCode::Validation,
                        "metric must be fidelity_alpha, fidelity_beta, crossings or vorticity",
                        "metric");
    }
    s.validate();
    return s;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers) {
    spec.validate();
    if (workers < 1) throw Error(ErrorCode::Validation, "workers must be >= 1", "workers");
    const std::size_t n = spec.values1.size() * (spec.axis2 ? spec.values2.size() : 1);
    std::vector<SweepRow> rows(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) rows[i] = run_cell(spec, i);
    };
    const int threads = static_cast<int>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    for (int k = 1; k < threads; ++k) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.value1 != b.value1) return a.value1 < b.value1;
        if (a.value2 != b.value2) return a.value2 < b.value2;
        return a.index < b.index;
    });
    return rows;
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
    out << "index," << lower(to_string(spec.axis1));
    if (spec.axis2) out << "," << lower(to_string(*spec.axis2));
    out << ",cell_seed,fidelity_alpha,fidelity_beta,crossings,dynamic_vorticity,tau_ratio,"
        << "value,error\n";
    for (const SweepRow& r : rows) {
        out << r.index << "," << fmt(r.value1);
        if (spec.axis2) out << "," << fmt(r.value2);
        out << "," << r.seed;
        if (r.error.empty()) {
            out << "," << fmt(r.fidelity_alpha) << "," << fmt(r.fidelity_beta) << ","
                << r.crossings << "," << fmt(r.vorticity) << "," << fmt(r.tau_ratio) << ","
                << fmt(r.metric) << ",\n";
        } else {
            out << ",,,,,,," << csv_quote(r.error) << "\n";
        }
    }
}

std::vector<MeshPoint> riemann_mesh(const HamiltonianSpec& hspec, const MeshBounds& b,
                                    int resolution) {
    if (resolution < 8)
        throw Error(ErrorCode::Validation, "resolution must be >= 8", "resolution", resolution);
    if (!(b.delta_max > b.delta_min) || !(b.j_max > b.j_min))
        throw Error(ErrorCode::Validation, "mesh bounds must be increasing", "bounds");
    if (!is_parametric_family(hspec.family))
        throw Error(ErrorCode::UnsupportedFamily, "mesh needs a parametric family", "hamiltonian.family");
    const int n = resolution;
    auto coord = [n](double lo, double hi, int k) { return k == n - 1 ? hi : lo + (hi - lo) * k / (n - 1); };
    std::vector<MeshPoint> mesh;
    mesh.reserve(static_cast<std::size_t>(n) * n);
    cplx row_start{};
    for (int r = 0; r < n; ++r) {
        const double j = coord(b.j_min, b.j_max, r);
        cplx prev{};
        for (int k = 0; k < n; ++k) {
            const double d = coord(b.delta_min, b.delta_max, k);
            const cplx w = principal_sqrt(root_squared(hspec.gamma, d, j));
            cplx root;
            if (k == 0) {
                root = r == 0 ? w : align_sign(w, row_start);
                row_start = root;
            } else {
                root = align_sign(w, prev);
            }
            prev = root;
            mesh.push_back({d, j, root, -root});
        }
    }
    return mesh;
}

void write_mesh_csv(std::ostream& out, const std::vector<MeshPoint>& mesh) {
    out << "delta,j,re_lambda_plus,im_lambda_plus,re_lambda_minus,im_lambda_minus\n";
    for (const MeshPoint& p : mesh)
        out << fmt(p.delta) << "," << fmt(p.j) << "," << fmt(p.lambda_plus.real()) << ","
            << fmt(p.lambda_plus.imag()) << "," << fmt(p.lambda_minus.real()) << ","
            << fmt(p.lambda_minus.imag()) << "\n";
}

Json table_json(const std::vector<TableEntry>& entries) {
    Json out;
    for (const TableEntry& e : entries) {
        Json row;
        row["expected"] = to_string(e.row.expected);
        row["predicted"] = to_string(e.predicted);
        row["observed"] = to_string(e.observed);
        row["agrees"] = e.predicted == e.observed && e.observed == e.row.expected;
        if (e.row.kind == PairKind::CHIRALITY)
            row["chirality"] = chirality_json(e.chirality);
        else
            row["reciprocity"] = reciprocity_json(e.reciprocity);
        row["first"] = evidence_json(e.verdict.a);
        row["second"] = evidence_json(e.verdict.b);
        const std::string fam = e.row.apt ? "APT" : "PT";
        const std::string kind = lower(to_string(e.row.kind));
        const std::string prime = e.row.apt ? "'" : "";
        out[fam][kind][std::to_string(e.row.first) + prime + " and " +
                       std::to_string(e.row.second) + prime] = row;
    }
    return out;
}

}  // namespace epdyn
