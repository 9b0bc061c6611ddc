#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "epdyn/error.hpp"
#include "epdyn/pipeline.hpp"

using namespace epdyn;

namespace {

std::string field_of(const Json& j) {
    try {
        config_from_json(j);
    } catch (const Error& e) {
        return e.field();
    }
    return "";
}

std::string sweep_csv(const SweepSpec& s, int workers) {
    std::ostringstream os;
    write_sweep_csv(os, s, run_sweep(s, workers));
    return os.str();
}

}  // namespace

TEST_CASE("config validation names the field") {
    CHECK(field_of(Json::parse(R"({"loop": {"radius": -1}})")) == "loop.radius");
    CHECK(field_of(Json::parse(R"({"loop": {"radius": 0}})")) == "loop.radius");
    CHECK(field_of(Json::parse(R"({"loop": {"period": 0}})")) == "loop.period");
    CHECK(field_of(Json::parse(R"({"loop": {"noise_intensity": -0.1}})")) == "loop.noise_intensity");
    CHECK(field_of(Json::parse(R"({"loop": {"samples": 1}})")) == "loop.samples");
    CHECK(field_of(Json::parse(R"({"loop": {"radius": "big"}})")) == "loop.radius");
    CHECK(field_of(Json::parse(R"({"loop": {"spin": 1}})")) == "loop.spin");
    CHECK(field_of(Json::parse(R"({"colour": 1})")) == "colour");
    CHECK(field_of(Json::parse(R"({"hamiltonian": {"family": "XY"}})")) == "hamiltonian.family");
    CHECK(field_of(Json::parse(R"({"emit": ["plots"]})")) == "emit");
    CHECK(field_of(Json::parse(R"({"initial_state": "GAMMA"})")) == "initial_state");
    try {
        config_from_json(Json::parse(R"({"hamiltonian": {"family": "CUSTOM"}})"));
        FAIL("expected MissingCustomMatrix");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingCustomMatrix);
    }
}

TEST_CASE("config round trip") {
    const Json j = Json::parse(R"({
        "preset": "trajectory-3",
        "hamiltonian": {"family": "CUSTOM", "gamma": 0.0,
                        "custom_matrix": [[1, 0], [0.2, 0], [0.3, -0.1], [-1, 0]]},
        "loop": {"period": 100, "seed": 7, "noise_intensity": 0.3},
        "initial_state": {"custom": [[1, 0], [0, 1]]},
        "outputs": "x",
        "emit": ["trajectory"]})");
    const ScenarioConfig c = config_from_json(j);
    CHECK(c.scenario.name == "trajectory-3");
    CHECK(c.scenario.loop.direction == Direction::CW);
    CHECK(c.scenario.loop.period == 100);
    CHECK(c.scenario.initial.kind == InitialKind::CUSTOM);
    const ScenarioConfig back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("shipped preset files match the built-in presets") {
    const std::filesystem::path dir = std::filesystem::path(EPDYN_SOURCE_DIR) / "presets";
    for (const std::string& name : preset_names()) {
        INFO(name);
        std::ifstream f(dir / (name + ".json"));
        REQUIRE(f.good());
        const ScenarioConfig c = config_from_json(Json::parse(f));
        CHECK(to_json(c.scenario) == to_json(preset(name)));
    }
}

TEST_CASE("scenario summaries for trajectories 1 and 2") {
    ScenarioConfig c;
    c.scenario = preset("trajectory-1");
    c.scenario.loop.samples = 401;
    const Json s1 = run_scenario(c).summary;
    CHECK(s1["fidelity_beta"].get<double>() >= 0.9);
    CHECK(s1["crossings"] == 0);
    CHECK(s1["dynamic_vorticity"] == -0.5);
    CHECK(s1["tau_crit"].get<double>() == doctest::Approx(11.8).epsilon(0.02));
    CHECK(s1["classification"]["chirality"]["predicted_chiral"] == true);

    c.scenario = preset("trajectory-2");
    c.scenario.loop.samples = 401;
    const Json s2 = run_scenario(c).summary;
    CHECK(s2["fidelity_alpha"].get<double>() >= 0.9);
    CHECK(s2["crossings"] == 1);
    CHECK(s2["dynamic_vorticity"] == 0.5);
}

TEST_CASE("outputs are written and deterministic") {
    ScenarioConfig c;
    c.scenario = preset("trajectory-5");
    c.scenario.loop.samples = 101;
    c.scenario.loop.noise_intensity = 0.4;
    c.scenario.loop.seed = 11;
    c.emit.insert(Emit::RIEMANN_MESH);
    const auto tmp = std::filesystem::temp_directory_path() / "epdyn_pipeline_test";
    std::filesystem::remove_all(tmp);
    write_outputs(run_scenario(c), c, (tmp / "a").string());
    write_outputs(run_scenario(c), c, (tmp / "b").string());
    for (const char* f : {"summary.json", "trajectory.csv", "r_series.csv", "winding.csv", "riemann.csv"}) {
        INFO(f);
        std::ifstream a(tmp / "a" / f, std::ios::binary), b(tmp / "b" / f, std::ios::binary);
        REQUIRE(a.good());
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        CHECK(sa.str() == sb.str());
        CHECK(!sa.str().empty());
    }
    std::filesystem::remove_all(tmp);
}

TEST_CASE("sweeps are sorted and independent of the worker count") {
    SweepSpec s;
    s.base.scenario = preset("trajectory-1");
    s.base.scenario.loop.samples = 101;
    s.axis1 = SweepAxis::NOISE_INTENSITY;
    s.values1 = {0.5, 0.0, 0.3};
    s.axis2 = SweepAxis::SEED;
    s.values2 = {3, 1, 2};
    const std::vector<SweepRow> rows = run_sweep(s, 1);
    REQUIRE(rows.size() == 9);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK((rows[i - 1].value1 < rows[i].value1 ||
               (rows[i - 1].value1 == rows[i].value1 && rows[i - 1].value2 < rows[i].value2)));
    }
    for (const SweepRow& r : rows)
        CHECK(r.seed == (static_cast<std::uint64_t>(r.value2) ^ splitmix64(r.index)));
    const std::string one = sweep_csv(s, 1);
    CHECK(sweep_csv(s, 2) == one);
    CHECK(sweep_csv(s, 8) == one);
}

TEST_CASE("period sweep orders the fidelity") {
    SweepSpec s;
    s.base.scenario = preset("trajectory-1");
    s.base.scenario.loop.samples = 201;
    s.axis1 = SweepAxis::PERIOD;
    s.values1 = {250, 16.67, 100};
    const std::vector<SweepRow> rows = run_sweep(s, 2);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value1 == 16.67);
    CHECK(rows[0].metric < rows[1].metric);
    CHECK(rows[1].metric < rows[2].metric);
    CHECK(rows[0].tau_ratio == doctest::Approx(11.8 / 16.67).epsilon(0.02));
    CHECK(rows[0].crossings > rows[2].crossings);
}

TEST_CASE("noise sweep keeps the fidelity") {
    SweepSpec s;
    s.base.scenario = preset("trajectory-1");
    s.base.scenario.loop.samples = 201;
    s.axis1 = SweepAxis::NOISE_INTENSITY;
    s.values1 = {0.0, 0.3, 0.5};
    s.axis2 = SweepAxis::SEED;
    for (int k = 1; k <= 10; ++k) s.values2.push_back(k);
    const std::vector<SweepRow> rows = run_sweep(s, 2);
    double lo = 1, hi = 0;
    for (const SweepRow& r : rows) {
        CHECK(r.error.empty());
        CHECK(r.vorticity == -0.5);
        lo = std::min(lo, r.fidelity_beta);
        hi = std::max(hi, r.fidelity_beta);
    }
    CHECK(hi - lo < 0.05);
}

TEST_CASE("failing cells are recorded") {
    SweepSpec s;
    s.base.scenario = preset("trajectory-1");
    s.base.scenario.loop.samples = 51;
    s.axis1 = SweepAxis::RADIUS;
    s.values1 = {0.03, 0.12};  // 0.12 runs through the lower EP
    const std::vector<SweepRow> rows = run_sweep(s, 1);
    CHECK(rows[0].error.empty());
    CHECK_FALSE(rows[1].error.empty());
    std::ostringstream os;
    write_sweep_csv(os, s, rows);
    CHECK(os.str().find(",,,,,,,\"") != std::string::npos);
}

TEST_CASE("sweep config parsing") {
    const SweepSpec s = sweep_from_json(Json::parse(R"({
        "base": {"preset": "trajectory-1"},
        "axis1": {"name": "RADIUS", "values": [0.003, 0.008, 0.03]},
        "metric": "crossings"})"));
    CHECK(s.axis1 == SweepAxis::RADIUS);
    CHECK(!s.axis2);
    CHECK(s.metric == SweepMetric::CROSSINGS);
    CHECK_THROWS_AS(sweep_from_json(Json::parse(R"({"axis1": {"name": "MASS", "values": [1]}})")), Error);
    CHECK_THROWS_AS(sweep_from_json(Json::parse(R"({"axis1": {"name": "RADIUS", "values": [-1]}})")), Error);
    CHECK_THROWS_AS(run_sweep(s, 0), Error);
}

TEST_CASE("Riemann mesh") {
    const HamiltonianSpec h{Family::PT_PASSIVE, 0.06, {}};
    const std::vector<MeshPoint> mesh = riemann_mesh(h, {-0.12, 0.12, 0.0, 0.12}, 9);
    REQUIRE(mesh.size() == 81);
    bool saw_ep = false;
    for (const MeshPoint& p : mesh) {
        CHECK(p.lambda_minus == -p.lambda_plus);
        if (p.delta != 0) continue;
        if (p.j == 0.06) {
            saw_ep = true;
            CHECK(p.lambda_plus == cplx(0.0, 0.0));
        } else if (p.j > 0.06) {
            CHECK(p.lambda_plus.imag() == 0.0);
            CHECK(std::abs(p.lambda_plus.real()) == doctest::Approx(std::sqrt(p.j * p.j - 0.0036)));
        } else {
            CHECK(p.lambda_plus.real() == 0.0);
        }
    }
    CHECK(saw_ep);
    // neighbours along a row never jump sheets
    for (std::size_t i = 1; i < mesh.size(); ++i)
        if (mesh[i].j == mesh[i - 1].j)
            CHECK(std::abs(mesh[i].lambda_plus - mesh[i - 1].lambda_plus) <=
                  std::abs(mesh[i].lambda_plus + mesh[i - 1].lambda_plus));
    CHECK_THROWS_AS(riemann_mesh(h, {}, 7), Error);
}

TEST_CASE("table report layout") {
    const Json t = table_json(reproduce_table(201));
    CHECK(t["PT"]["chirality"]["1 and 2"]["observed"] == "CHIRAL");
    CHECK(t["PT"]["reciprocity"]["3 and 4"]["observed"] == "NONRECIPROCAL");
    CHECK(t["APT"]["chirality"]["7' and 8'"]["predicted"] == "NONCHIRAL");
    for (const auto& fam : t)
        for (const auto& kind : fam)
            for (const auto& row : kind) CHECK(row["agrees"] == true);
}
