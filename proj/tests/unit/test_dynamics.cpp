#include <doctest.h>

#include <cmath>

#include "sislab/dynamics.hpp"
#include "sislab/equilibria.hpp"
#include "sislab/error.hpp"
#include "sislab/suite.hpp"

using namespace sislab;

namespace {

StateField constant_state(std::size_t n, double s, double i) {
    StateField st;
    st.S.assign(n, s);
    st.I.assign(n, i);
    return st;
}

SimOptions run_to(double t_end, double dt = 0.01, double every = 1.0) {
    SimOptions o;
    o.dt = dt;
    o.t_end = t_end;
    o.output_every = every;
    return o;
}

}  // namespace

TEST_CASE("constant data relaxes to the endemic state") {
    const Mesh m = build_mesh(1.0, 100);
    const SimulationTrace tr = simulate(constant_state(100, 1.0, 0.1), cs_a(), m, run_to(200.0, 0.01, 10.0));
    const EquilibriumResult ee = solve_ee(cs_a(), m);
    CHECK(sup_distance(tr.final.S, ee.S) <= 1e-6);
    CHECK(sup_distance(tr.final.I, ee.I) <= 1e-6);
    CHECK(tr.final.t == 200.0);
    CHECK(tr.samples.size() == 21);
    CHECK(tr.max_mass_defect <= 1e-10);
}

TEST_CASE("subcritical transmission dies out") {
    const Mesh m = build_mesh(1.0, 100);
    const SimulationTrace tr = simulate(constant_state(100, 1.0, 0.1), cs_a(0.5), m, run_to(200.0, 0.01, 10.0));
    CHECK(tr.samples.back().mass_I < 1e-8);
    CHECK(tr.samples.back().min_I > 0.0);
}

TEST_CASE("positivity and mass law on random data") {
    for (const CoefficientSet& cs : random_configs(11, 8)) {
        const Mesh m = build_mesh(cs.L, 120, Grading::geometric(0.99));
        StateField init;
        init.S = sample_on_mesh(parse_expr("1 + 0.5*sin(7*x)"), m);
        init.I = sample_on_mesh(parse_expr("0.2 + 0.1*cos(3*x)"), m);
        const SimulationTrace tr = simulate(init, cs, m, run_to(5.0, 0.05, 0.5));
        for (const TraceSample& s : tr.samples) {
            CHECK(s.min_S > 0.0);
            CHECK(s.min_I > 0.0);
        }
        for (std::size_t k = 1; k < tr.samples.size(); ++k) CHECK(tr.samples[k].t > tr.samples[k - 1].t);
        CHECK(tr.max_mass_defect <= 1e-10);
    }
}

TEST_CASE("option and state validation") {
    const Mesh m = build_mesh(1.0, 20);
    CHECK_THROWS_AS(simulate(constant_state(20, 1, 1), cs_a(), m, run_to(0.01, 0.01)), ConfigError);
    CHECK_THROWS_AS(simulate(constant_state(20, 1, 0), cs_a(), m, run_to(1.0)), ConfigError);
    CHECK_THROWS_AS(simulate(constant_state(19, 1, 1), cs_a(), m, run_to(1.0)), ConfigError);
    CHECK_THROWS_AS(initial_state(parse_expr("x - 0.5"), parse_expr("1"), m), ConfigError);
}

TEST_CASE("Lyapunov functional") {
    const Mesh m = build_mesh(1.0, 50);
    const StateField ref = constant_state(50, 1.0, 2.0);
    CHECK(lyapunov_F(ref, cs_a(), m, {ref.S, ref.I}) == 0.0);
    CHECK(lyapunov_F(constant_state(50, 2.0, 2.0), cs_a(), m, {ref.S, ref.I}) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("Lyapunov descent at strong saturation") {
    const Mesh m = build_mesh(1.0, 200);
    const CoefficientSet cs = cs_b(10.0);
    const AnalyticEE ee = analytic_ee_under_assumption(cs, m);
    SimOptions o = run_to(20.0, 0.01, 0.1);
    o.reference = ReferenceState{ee.S, ee.I};
    const SimulationTrace tr = simulate(initial_state(parse_expr("2 + sin(5*x)"), parse_expr("0.05"), m), cs, m, o);
    for (std::size_t k = 1; k < tr.samples.size(); ++k) {
        CHECK(tr.samples[k].F <= tr.samples[k - 1].F + 1e-10);
    }
    CHECK(tr.samples.back().F < 1e-3 * tr.samples.front().F);
}

TEST_CASE("boundedness and persistence monitors") {
    const Mesh m = build_mesh(1.0, 100);
    const SimulationTrace tr = simulate(constant_state(100, 1.0, 0.1), cs_a(), m, run_to(40.0, 0.01, 1.0));
    const MonitorReport rep = evaluate_monitors(tr, cs_a(), m);
    CHECK(rep.ceiling_applicable);
    CHECK(rep.eps0 == doctest::Approx(1.0 / 6.0));
    CHECK(rep.sigma == doctest::Approx(1.0 / 7.0));
    CHECK(rep.worst_ceiling_margin <= 0.0);
    CHECK(rep.worst_gronwall_margin <= 1e-12);
    CHECK(rep.samples.size() == tr.samples.size());

    const SimulationTrace tr2 = simulate(constant_state(100, 1.0, 0.1), cs_a(), m, run_to(80.0, 0.01, 1.0));
    const MonitorReport rep2 = evaluate_monitors(tr2, cs_a(), m);
    CHECK(rep.eta_hat > 0.0);
    CHECK(std::abs(rep2.eta_hat - rep.eta_hat) <= 0.2 * rep.eta_hat);

    CoefficientSet unequal = cs_a();
    unequal.dI = 0.5;
    const SimulationTrace tr3 = simulate(constant_state(100, 1.0, 0.1), unequal, m, run_to(1.0, 0.01, 0.5));
    const MonitorReport rep3 = evaluate_monitors(tr3, unequal, m);
    CHECK_FALSE(rep3.ceiling_applicable);
    CHECK_FALSE(rep3.samples.front().ceiling_margin.has_value());
}
