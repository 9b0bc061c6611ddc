#pragma once

// Chirality and reciprocity of encircling pairs.
//
// Prediction: the antilinear S = C P T with C = sigma_z, P = sigma_x and T
// complex conjugation acts as S[M] = U conj(M) U^-1, U = sigma_z sigma_x.
// A pair is predicted chiral when S[h_tilde(0)] = -h_tilde(0). It is
// predicted reciprocal when <O> > 0 at t = 0, or when <O> = 0 and <O>
// increases. O is sigma_z for the PT families and sigma_x (the image of
// sigma_z under Ry(pi/2)) for the APT families.
//
// Observation: endpoints are assigned by the larger of the two final
// fidelities against alpha(0) and beta(0).

#include <string>
#include <utility>
#include <vector>

#include "epdyn/core.hpp"
#include "epdyn/evolve.hpp"
#include "epdyn/loop.hpp"
#include "epdyn/model.hpp"

namespace epdyn {

struct ChiralityReport {
    double anticommutator_residual = 0;  ///< ||S[h] + h||_F
    double tolerance = 0;
    bool predicted_chiral = false;
    std::string operator_used;
};

/// predicted_chiral = residual < rel_tolerance * ||h_tilde0||_F.
ChiralityReport chirality_test(const CMat2& h_tilde0, double rel_tolerance = 1e-8);

struct ReciprocityOptions {
    double deriv_gate = 1e-10;
    double secant_fraction = 1e-3;  ///< secant step as a fraction of T
    PropagateOptions propagation{};
};

struct ReciprocityReport {
    double sz_expectation = 0;  ///< <O> at t = 0
    double sz_derivative = 0;   ///< secant slope of <O> over [0, tau], 1/us (gate case only)
    double analytic_rate = 0;   ///< instantaneous d<O>/dt at t = 0, 1/us
    bool gated = false;         ///< |sz_expectation| < deriv_gate
    bool predicted_reciprocal = false;
    std::string operator_used;
};

/// Instantaneous d<O>/dt of the normalized state under i psi' = H psi:
/// -i <O H - H^dag O> - 2 <O> Im<H>.
double expectation_rate(const CMat2& h, const CMat2& o, const CVec2& psi);

ReciprocityReport reciprocity_test(const CVec2& psi0, const HamiltonianSpec& hspec,
                                   const LoopSpec& lspec, const ReciprocityOptions& opts = {});

enum class PairKind { CHIRALITY, RECIPROCITY };
enum class Relation { CHIRAL, NONCHIRAL, RECIPROCAL, NONRECIPROCAL };

const char* to_string(PairKind k);
const char* to_string(Relation r);

struct RunEvidence {
    double initial_fidelity_alpha = 0, initial_fidelity_beta = 0;
    double final_fidelity_alpha = 0, final_fidelity_beta = 0;
    int initial_state = 0;  ///< 0 alpha, 1 beta
    int final_state = 0;
    int crossings = 0;      ///< |C1| = |C2| crossings
};

struct PairVerdict {
    PairKind kind = PairKind::CHIRALITY;
    Relation relation = Relation::CHIRAL;
    RunEvidence a, b;
};

/// Empirical relation of two runs over the same loop geometry. CHIRALITY:
/// chiral iff the final states differ. RECIPROCITY: reciprocal iff
/// final(a) = initial(b) and final(b) = initial(a). Throws AmbiguousEndpoint
/// when both final fidelities of a run lie in [0.4, 0.6], Validation when
/// the runs do not share the geometry.
PairVerdict classify_pair(const TrajectoryRecord& run_a, const TrajectoryRecord& run_b,
                          PairKind kind);

/// One row of the chirality/reciprocity table.
struct TableRow {
    bool apt = false;
    PairKind kind = PairKind::CHIRALITY;
    int first = 0, second = 0;  ///< trajectory numbers 1..8
    Relation expected = Relation::CHIRAL;
};

/// The 24 published pairings (12 PT, 12 APT).
std::vector<TableRow> table_rows();

struct TableEntry {
    TableRow row;
    Relation predicted = Relation::CHIRAL;
    Relation observed = Relation::CHIRAL;
    ChiralityReport chirality;      ///< of the first run (CHIRALITY rows)
    ReciprocityReport reciprocity;  ///< of the first run (RECIPROCITY rows)
    PairVerdict verdict;
};

/// Runs all 16 presets at the given sample count and evaluates every row.
std::vector<TableEntry> reproduce_table(int samples = 1001, const PropagateOptions& opts = {});

}  // namespace epdyn
