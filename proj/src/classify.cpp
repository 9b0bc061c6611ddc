#include "epdyn/classify.hpp"

#include <array>
#include <tuple>
#include <cmath>

#include "epdyn/error.hpp"
#include "epdyn/scenario.hpp"
#include "epdyn/transport.hpp"

namespace epdyn {

namespace {

const CMat2 kU{0.0, 1.0, -1.0, 0.0};     // sigma_z sigma_x
const CMat2 kUinv{0.0, -1.0, 1.0, 0.0};

double expectation(const CMat2& o, const CVec2& psi) {
    const CVec2 p = psi.normalized();
    return inner(p, o * p).real();
}

CMat2 reciprocity_operator(Family f) { return pauli(is_apt(f) ? Pauli::X : Pauli::Z); }

RunEvidence evidence(const TrajectoryRecord& run) {
    RunEvidence e;
    const std::pair<CVec2, CVec2> targets{run.alpha0, run.beta0};
    auto fid = [&](const CVec2& psi) {
        const CVec2 p = psi.normalized();
        return std::make_pair(std::norm(inner(run.alpha0.normalized(), p)),
                              std::norm(inner(run.beta0.normalized(), p)));
    };
    std::tie(e.initial_fidelity_alpha, e.initial_fidelity_beta) = fid(run.samples.front().psi);
    std::tie(e.final_fidelity_alpha, e.final_fidelity_beta) = transfer_fidelity(run, targets);
    auto in_band = [](double x) { return x >= 0.4 && x <= 0.6; };
    if (in_band(e.final_fidelity_alpha) && in_band(e.final_fidelity_beta))
        throw Error(ErrorCode::AmbiguousEndpoint, "final state is not assignable to alpha or beta",
                    {}, e.final_fidelity_alpha);
    e.initial_state = e.initial_fidelity_beta > e.initial_fidelity_alpha ? 1 : 0;
    e.final_state = e.final_fidelity_beta > e.final_fidelity_alpha ? 1 : 0;
    e.crossings = static_cast<int>(detect_transitions(run).size());
    return e;
}

bool same_geometry(const TrajectoryRecord& a, const TrajectoryRecord& b) {
    const LoopSpec& x = a.loop;
    const LoopSpec& y = b.loop;
    return a.hamiltonian.family == b.hamiltonian.family &&
           a.hamiltonian.gamma == b.hamiltonian.gamma && x.j_center == y.j_center &&
           x.radius == y.radius && x.theta0 == y.theta0 && x.period == y.period;
}

}  // namespace

const char* to_string(PairKind k) {
    return k == PairKind::CHIRALITY ? "CHIRALITY" : "RECIPROCITY";
}

const char* to_string(Relation r) {
    switch (r) {
        case Relation::CHIRAL: return "CHIRAL";
        case Relation::NONCHIRAL: return "NONCHIRAL";
        case Relation::RECIPROCAL: return "RECIPROCAL";
        case Relation::NONRECIPROCAL: return "NONRECIPROCAL";
    }
    return "?";
}

ChiralityReport chirality_test(const CMat2& h_tilde0, double rel_tolerance) {
    ChiralityReport r;
    const CMat2 s = kU * h_tilde0.conj() * kUinv;
    r.anticommutator_residual = (s + h_tilde0).norm();
    r.tolerance = rel_tolerance * h_tilde0.norm();
    r.predicted_chiral = r.anticommutator_residual < r.tolerance;
    r.operator_used = "S = sigma_z sigma_x K, S[M] = U conj(M) U^-1 with U = sigma_z sigma_x";
    return r;
}

double expectation_rate(const CMat2& h, const CMat2& o, const CVec2& psi) {
    const CVec2 p = psi.normalized();
    const cplx comm = inner(p, (o * h - h.adjoint() * o) * p);
    const double im_h = inner(p, h * p).imag();
    return (-kI * comm).real() - 2 * expectation(o, p) * im_h;
}

ReciprocityReport reciprocity_test(const CVec2& psi0, const HamiltonianSpec& hspec,
                                   const LoopSpec& lspec, const ReciprocityOptions& opts) {
    lspec.validate();
    const CMat2 o = reciprocity_operator(hspec.family);
    ReciprocityReport r;
    r.operator_used = is_apt(hspec.family) ? "sigma_x" : "sigma_z";
    const CVec2 p = psi0.normalized();
    r.sz_expectation = expectation(o, p);
    const PathPoint start = path_at(lspec, 0.0);
    r.analytic_rate = expectation_rate(build(hspec, start.delta, start.j), o, p);
    r.gated = std::abs(r.sz_expectation) < opts.deriv_gate;
    if (r.gated) {
        const double tau = opts.secant_fraction * lspec.period;
        const TrajectoryRecord rec = propagate_at(hspec, lspec, p, {0.0, tau}, opts.propagation);
        r.sz_derivative = (expectation(o, rec.final().psi) - r.sz_expectation) / tau;
        r.predicted_reciprocal = r.sz_derivative > 0;
    } else {
        r.predicted_reciprocal = r.sz_expectation > 0;
    }
    return r;
}

PairVerdict classify_pair(const TrajectoryRecord& run_a, const TrajectoryRecord& run_b,
                          PairKind kind) {
    if (run_a.samples.empty() || run_b.samples.empty())
        throw Error(ErrorCode::Validation, "empty trajectory record", "run");
    if (!same_geometry(run_a, run_b))
        throw Error(ErrorCode::Validation, "runs do not share the loop geometry", "run");
    PairVerdict v;
    v.kind = kind;
    v.a = evidence(run_a);
    v.b = evidence(run_b);
    if (kind == PairKind::CHIRALITY) {
        v.relation = v.a.final_state != v.b.final_state ? Relation::CHIRAL : Relation::NONCHIRAL;
    } else {
        const bool swap = v.a.final_state == v.b.initial_state &&
                          v.b.final_state == v.a.initial_state;
        v.relation = swap ? Relation::RECIPROCAL : Relation::NONRECIPROCAL;
    }
    return v;
}

std::vector<TableRow> table_rows() {
    using R = Relation;
    struct Pair {
        PairKind kind;
        int first, second;
        R expected;
    };
    static const std::array<Pair, 12> kPairs{{
        {PairKind::CHIRALITY, 1, 2, R::CHIRAL},
        {PairKind::CHIRALITY, 3, 4, R::CHIRAL},
        {PairKind::CHIRALITY, 5, 6, R::NONCHIRAL},
        {PairKind::CHIRALITY, 7, 8, R::NONCHIRAL},
        {PairKind::RECIPROCITY, 1, 4, R::RECIPROCAL},
        {PairKind::RECIPROCITY, 4, 1, R::RECIPROCAL},
        {PairKind::RECIPROCITY, 2, 1, R::NONRECIPROCAL},
        {PairKind::RECIPROCITY, 3, 4, R::NONRECIPROCAL},
        {PairKind::RECIPROCITY, 5, 6, R::RECIPROCAL},
        {PairKind::RECIPROCITY, 6, 5, R::RECIPROCAL},
        {PairKind::RECIPROCITY, 7, 6, R::NONRECIPROCAL},
        {PairKind::RECIPROCITY, 8, 5, R::NONRECIPROCAL},
    }};
    std::vector<TableRow> rows;
    for (bool apt : {false, true})
        for (const Pair& p : kPairs) rows.push_back({apt, p.kind, p.first, p.second, p.expected});
    return rows;
}

std::vector<TableEntry> reproduce_table(int samples, const PropagateOptions& opts) {
    std::array<std::array<TrajectoryRecord, 8>, 2> runs;
    std::array<std::array<Scenario, 8>, 2> scen;
    for (int a = 0; a < 2; ++a)
        for (int k = 1; k <= 8; ++k) {
            Scenario s = preset(preset_name(k, a == 1));
            const CVec2 psi0 = resolve_initial(s.hamiltonian, s.loop, s.initial);
            runs[a][k - 1] = propagate(s.hamiltonian, s.loop, psi0, samples, opts);
            scen[a][k - 1] = std::move(s);
        }
    std::vector<TableEntry> out;
    for (const TableRow& row : table_rows()) {
        const int a = row.apt ? 1 : 0;
        const Scenario& first = scen[a][row.first - 1];
        TableEntry e;
        e.row = row;
        e.verdict = classify_pair(runs[a][row.first - 1], runs[a][row.second - 1], row.kind);
        e.observed = e.verdict.relation;
        if (row.kind == PairKind::CHIRALITY) {
            const TransportFrame fr = frame_at(first.hamiltonian, first.loop, 0.0);
            e.chirality = chirality_test(fr.h_tilde);
            e.predicted = e.chirality.predicted_chiral ? Relation::CHIRAL : Relation::NONCHIRAL;
        } else {
            const CVec2 psi0 = runs[a][row.first - 1].samples.front().psi;
            e.reciprocity = reciprocity_test(psi0, first.hamiltonian, first.loop);
            e.predicted = e.reciprocity.predicted_reciprocal ? Relation::RECIPROCAL
                                                             : Relation::NONRECIPROCAL;
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace epdyn
