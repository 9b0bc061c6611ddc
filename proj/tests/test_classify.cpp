#include <cmath>
#include <random>

#include "doctest.h"
#include "epdyn/classify.hpp"
#include "epdyn/error.hpp"
#include "epdyn/scenario.hpp"
#include "epdyn/transport.hpp"
#include "oracles.hpp"

using namespace epdyn;

namespace {

TrajectoryRecord run_preset(int k, bool apt, int samples = 401) {
    const Scenario s = preset(preset_name(k, apt));
    return propagate(s.hamiltonian, s.loop, resolve_initial(s.hamiltonian, s.loop, s.initial),
                     samples);
}

CMat2 h_tilde_at_start(int k, bool apt) {
    const Scenario s = preset(preset_name(k, apt));
    return frame_at(s.hamiltonian, s.loop, 0.0).h_tilde;
}

}  // namespace

TEST_CASE("antilinear action matches the operator identity") {
    // (A H + H A) psi with A = U K equals (S[H] + H) U conj(psi).
    std::mt19937_64 rng(5);
    const CMat2 u{0.0, 1.0, -1.0, 0.0};
    for (int n = 0; n < 20; ++n) {
        const CMat2 h = oracle::random_matrix(rng);
        const CVec2 psi = oracle::random_vector(rng);
        auto anti = [&](const CVec2& x) { return u * CVec2{std::conj(x.a0), std::conj(x.a1)}; };
        const CVec2 lhs = anti(h * psi) + h * anti(psi);
        const CMat2 s = u * h.conj() * u.inverse();
        const CVec2 rhs = (s + h) * anti(psi);
        CHECK((lhs - rhs).norm() < 1e-12);
        const ChiralityReport r = chirality_test(h);
        CHECK(r.anticommutator_residual == doctest::Approx((s + h).norm()).epsilon(1e-12));
    }
}

TEST_CASE("chirality of the starting frame") {
    const ChiralityReport a = chirality_test(h_tilde_at_start(1, false));
    CHECK(a.predicted_chiral);
    CHECK(a.anticommutator_residual < 1e-14);
    const ChiralityReport b = chirality_test(h_tilde_at_start(5, false));
    CHECK_FALSE(b.predicted_chiral);
    CHECK(b.anticommutator_residual > 1e-3);
}

TEST_CASE("Hermitian diagonal frame is chiral") {
    const double l = 0.07;
    const CMat2 h{-l, 0.0, 0.0, l};
    CHECK(chirality_test(h).anticommutator_residual == 0.0);
    CHECK(chirality_test(h).predicted_chiral);
}

TEST_CASE("chirality verdict is scale invariant") {
    for (int k : {1, 3, 5, 7})
        for (bool apt : {false, true}) {
            const CMat2 h = h_tilde_at_start(k, apt);
            const bool v = chirality_test(h).predicted_chiral;
            for (double c : {-3.0, 0.5, 10.0, 1e-3})
                CHECK(chirality_test(cplx(c) * h).predicted_chiral == v);
        }
}

TEST_CASE("PT and APT chirality predictions agree start by start") {
    for (int k : {1, 5}) {
        CHECK(chirality_test(h_tilde_at_start(k, true)).predicted_chiral ==
              chirality_test(h_tilde_at_start(k, false)).predicted_chiral);
    }
    // Start A of the APT loop lies in its broken phase and start B in its
    // symmetric phase.
    const Scenario a = preset("apt-trajectory-1");
    const PathPoint p = path_at(a.loop, 0.0);
    CHECK(eigensystem(a.hamiltonian, p.delta, p.j).regime == Regime::PTB);
    const Scenario b = preset("apt-trajectory-5");
    const PathPoint q = path_at(b.loop, 0.0);
    CHECK(eigensystem(b.hamiltonian, q.delta, q.j).regime == Regime::PTS);
    CHECK_FALSE(chirality_test(h_tilde_at_start(5, true)).predicted_chiral);
}

TEST_CASE("expectation rate matches a finite difference") {
    std::mt19937_64 rng(9);
    for (int n = 0; n < 10; ++n) {
        const CMat2 h = oracle::random_matrix(rng, 0.3);
        const CVec2 psi = oracle::random_vector(rng).normalized();
        for (Pauli p : {Pauli::X, Pauli::Z}) {
            const CMat2 o = pauli(p);
            auto ev = [&](double t) {
                const CVec2 x = (oracle::expm_series(cplx(0, -t) * h) * psi).normalized();
                return inner(x, o * x).real();
            };
            const double dt = 1e-5;
            const double fd = (ev(dt) - ev(-dt)) / (2 * dt);
            CHECK(expectation_rate(h, o, psi) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("reciprocity predictions") {
    const HamiltonianSpec pt{Family::PT_PASSIVE, 0.06, {}};
    LoopSpec l;
    const ReciprocityReport basis = reciprocity_test({1.0, 0.0}, pt, l);
    CHECK(basis.sz_expectation == doctest::Approx(1.0));
    CHECK(basis.predicted_reciprocal);
    CHECK_FALSE(basis.gated);

    for (int k = 1; k <= 8; ++k) {
        const Scenario s = preset(preset_name(k, false));
        const CVec2 psi = resolve_initial(s.hamiltonian, s.loop, s.initial);
        const ReciprocityReport r = reciprocity_test(psi, s.hamiltonian, s.loop);
        CHECK(r.operator_used == "sigma_z");
        if (k <= 4) {
            // |c|^2 = |s|^2 at D = 0 in the symmetric phase
            CHECK(r.gated);
            CHECK(std::abs(r.sz_expectation) < 1e-12);
            CHECK(std::abs(r.analytic_rate) < 1e-12);
            CHECK(r.sz_derivative != 0.0);
        } else {
            CHECK_FALSE(r.gated);
        }
        const bool expect = k == 1 || k == 4 || k == 5 || k == 6;
        CHECK(r.predicted_reciprocal == expect);
    }
    // beta_B: |lambda + i g| < |lambda - i g| puts more weight on the lower level
    const Scenario b7 = preset("trajectory-7");
    const ReciprocityReport r7 =
        reciprocity_test(resolve_initial(b7.hamiltonian, b7.loop, b7.initial), b7.hamiltonian, b7.loop);
    CHECK(r7.sz_expectation < 0);
}

TEST_CASE("APT reciprocity is evaluated with sigma_x") {
    for (int k = 1; k <= 8; ++k) {
        const Scenario a = preset(preset_name(k, true));
        const Scenario p = preset(preset_name(k, false));
        const ReciprocityReport ra =
            reciprocity_test(resolve_initial(a.hamiltonian, a.loop, a.initial), a.hamiltonian, a.loop);
        const ReciprocityReport rp =
            reciprocity_test(resolve_initial(p.hamiltonian, p.loop, p.initial), p.hamiltonian, p.loop);
        CHECK(ra.operator_used == "sigma_x");
        CHECK(ra.sz_expectation == doctest::Approx(rp.sz_expectation).epsilon(1e-9));
        CHECK(ra.predicted_reciprocal == rp.predicted_reciprocal);
    }
}

TEST_CASE("pair classification of the standard runs") {
    const TrajectoryRecord t1 = run_preset(1, false), t2 = run_preset(2, false);
    const TrajectoryRecord t5 = run_preset(5, false), t6 = run_preset(6, false);
    const PairVerdict c12 = classify_pair(t1, t2, PairKind::CHIRALITY);
    CHECK(c12.relation == Relation::CHIRAL);
    CHECK(c12.a.final_state == 1);
    CHECK(c12.b.final_state == 0);
    CHECK(c12.a.crossings == 0);
    CHECK(c12.b.crossings == 1);
    CHECK(classify_pair(t5, t6, PairKind::CHIRALITY).relation == Relation::NONCHIRAL);
    CHECK(classify_pair(t2, t1, PairKind::RECIPROCITY).relation == Relation::NONRECIPROCAL);
    CHECK(classify_pair(t5, t6, PairKind::RECIPROCITY).relation == Relation::RECIPROCAL);
}

TEST_CASE("pair classification rejects mismatched or ambiguous runs") {
    const TrajectoryRecord t1 = run_preset(1, false, 51), t5 = run_preset(5, false, 51);
    CHECK_THROWS_AS(classify_pair(t1, t5, PairKind::CHIRALITY), Error);

    TrajectoryRecord mixed = t1;
    mixed.alpha0 = {1.0, 0.0};
    mixed.beta0 = {0.0, 1.0};
    mixed.samples.back().psi = CVec2{1.0, 1.0}.normalized();
    try {
        classify_pair(mixed, t1, PairKind::CHIRALITY);
        FAIL("expected AmbiguousEndpoint");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AmbiguousEndpoint);
    }
}

TEST_CASE("the full table is reproduced") {
    const std::vector<TableEntry> table = reproduce_table(401);
    REQUIRE(table.size() == 24);
    for (const TableEntry& e : table) {
        INFO((e.row.apt ? "apt " : "pt ") << e.row.first << " & " << e.row.second << " "
                                          << to_string(e.row.kind));
        CHECK(e.observed == e.row.expected);
        CHECK(e.predicted == e.row.expected);
    }
}

TEST_CASE("presets") {
    CHECK(preset_names().size() == 16);
    const Scenario s = preset("apt-trajectory-7");
    CHECK(s.hamiltonian.family == Family::APT_PASSIVE);
    CHECK(s.loop.theta0 == kPi);
    CHECK(s.loop.direction == Direction::CW);
    CHECK(s.initial.kind == InitialKind::BETA);
    CHECK_THROWS_AS(preset("trajectory-9"), Error);
    CHECK_THROWS_AS(resolve_initial(s.hamiltonian, s.loop, {InitialKind::CUSTOM, {0.0, 0.0}}),
                    Error);
}
