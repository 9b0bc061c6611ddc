#pragma once

// End-to-end runs behind the command-line tool: single scenarios, parameter
// sweeps, the eigenvalue mesh and the chirality/reciprocity table.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "epdyn/classify.hpp"
#include "epdyn/evolve.hpp"
#include "epdyn/io.hpp"
#include "epdyn/topology.hpp"
#include "epdyn/transport.hpp"

namespace epdyn {

struct ScenarioResult {
    TrajectoryRecord trajectory;
    std::optional<RSeries> r_series;
    std::vector<WindingSample> winding;
    Json summary;
};

/// Propagate, then run every stage requested by config.emit. Module errors
/// propagate as epdyn::Error.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Write summary.json plus the emitted CSV files into `dir`.
void write_outputs(const ScenarioResult& result, const ScenarioConfig& config,
                   const std::string& dir);

/// Vorticity of a scenario's loop as a JSON object.
Json vorticity_json(const HamiltonianSpec& hspec, const LoopSpec& lspec);

enum class SweepAxis { PERIOD, RADIUS, NOISE_INTENSITY, SEED };
enum class SweepMetric { FIDELITY_ALPHA, FIDELITY_BETA, CROSSINGS, VORTICITY };

const char* to_string(SweepAxis a);
const char* to_string(SweepMetric m);

/// Grid over one or two axes. Cell (i, k) has index i * n2 + k and noise
/// seed base ^ splitmix64(index), where base is the SEED-axis value of the
/// cell when that axis is present and the scenario seed otherwise.
struct SweepSpec {
    ScenarioConfig base;
    SweepAxis axis1 = SweepAxis::PERIOD;
    std::vector<double> values1;
    std::optional<SweepAxis> axis2;
    std::vector<double> values2;
    SweepMetric metric = SweepMetric::FIDELITY_BETA;

    void validate() const;
};

/// JSON form: {"base": {config}, "axis1": {"name": "PERIOD", "values": [..]},
/// "axis2": {...}, "metric": "fidelity_beta"}.
SweepSpec sweep_from_json(const Json& j);

struct SweepRow {
    std::size_t index = 0;
    double value1 = 0, value2 = 0;
    std::uint64_t seed = 0;
    double fidelity_alpha = 0, fidelity_beta = 0;
    int crossings = 0;
    double vorticity = 0;
    double tau_ratio = 0;
    double metric = 0;
    std::string error;  ///< empty on success
};

/// Evaluate all cells on up to `workers` threads. Rows come back sorted by
/// (value1, value2, index) whatever the scheduling.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int workers);

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows);

struct MeshBounds {
    double delta_min = -0.1, delta_max = 0.1;
    double j_min = 0.0, j_max = 0.12;
};

struct MeshPoint {
    double delta = 0, j = 0;
    cplx lambda_plus{}, lambda_minus{};  ///< traceless branch values, lambda_minus = -lambda_plus
};

/// Grid of traceless eigenvalues, resolution x resolution. The branch is
/// started with the principal root at (delta_min, j_min) and continued along
/// each row, with each row's first point continued from the row below.
std::vector<MeshPoint> riemann_mesh(const HamiltonianSpec& hspec, const MeshBounds& bounds,
                                    int resolution);

void write_mesh_csv(std::ostream& out, const std::vector<MeshPoint>& mesh);

Json table_json(const std::vector<TableEntry>& entries);

}  // namespace epdyn
