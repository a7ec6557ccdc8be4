#include <doctest.h>

#include <cmath>

#include "sislab/error.hpp"
#include "sislab/spectral.hpp"
#include "sislab/suite.hpp"

using namespace sislab;

TEST_CASE("constant potential") {
    const Mesh m = build_mesh(1.0, 200);
    CHECK(std::abs(lambda1(m, 1.0, 0.0, Field(200, -2.0)).value + 2.0) <= 1e-12);
    const EigenResult r = lambda1(m, 1.0, 1.0, Field(200, 0.7));
    CHECK(std::abs(r.value - 0.7) <= 1e-11);
    // advective kernel e^{x}
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(r.vector[i] == doctest::Approx(std::exp(m.centers[i] - m.centers.back())).epsilon(1e-9));
    }
}

TEST_CASE("constant coefficient thresholds") {
    const Mesh m = build_mesh(1.0, 100);
    const ThresholdReport a = compute_R0(cs_a(), m);
    CHECK(std::abs(a.R0 - 3.0) <= 1e-10);
    CHECK(std::abs(a.lambda1 + 2.0) <= 1e-10);
    CHECK(a.consistent);
    const ThresholdReport b = compute_R0(cs_a(0.5), m);
    CHECK(std::abs(b.R0 - 0.5) <= 1e-10);
    CHECK(std::abs(b.lambda1 - 0.5) <= 1e-10);
    CHECK(b.consistent);

    CHECK(std::abs(compute_R0_star(cs_a(), m) - 3.0) <= 1e-10);
    const CoefficientSet c = make_coefficients("2", "1", "1", "1", 1.0, 1.0, 0.0, 1.0);
    CHECK(std::abs(compute_R0_star(c, m) - 2.0) <= 1e-10);
}

TEST_CASE("large susceptible diffusion approaches the averaged number") {
    const Mesh m = build_mesh(1.0, 1000);
    const double r0 = compute_R0(cs_c(1e3), m).R0;
    CHECK(std::abs(r0 - compute_R0_star(cs_c(1e3), m)) <= 0.01 * r0);
}

TEST_CASE("threshold equivalence over random data") {
    int tested = 0, above = 0, below = 0;
    for (const CoefficientSet& cs : random_configs(101, 60)) {
        const ThresholdReport r = compute_R0(cs, build_mesh(cs.L, 200));
        if (std::abs(r.R0 - 1.0) <= 1e-3) continue;
        ++tested;
        (r.R0 > 1.0 ? above : below)++;
        CHECK(r.consistent);
        CHECK((r.R0 > 1.0) == (r.lambda1 < 0.0));
    }
    CHECK(tested >= 50);
    CHECK(above > 5);
    CHECK(below > 5);
}

TEST_CASE("trial function bound") {
    for (const CoefficientSet& cs : random_configs(7, 10)) {
        const Mesh m = build_mesh(cs.L, 300, Grading::geometric(0.995));
        const ThresholdReport r = compute_R0(cs, m);
        Field eta(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) eta[i] = std::exp(cs.q * m.centers[i] / (2.0 * cs.dI));
        CHECK(r.R0 >= r0_trial_quotient(cs, m, r.S_hat, eta) * (1.0 - 1e-12));
        CHECK(r.R0 >= r0_trial_quotient(cs, m, r.S_hat, Field(m.size(), 1.0)) * (1.0 - 1e-12));
    }
}

TEST_CASE("R0 grows with advection") {
    const Mesh m = build_mesh(1.0, 1000, Grading::geometric(0.995));
    double prev = 0.0;
    for (double q : {5.0, 10.0, 20.0, 40.0}) {
        CoefficientSet cs = cs_c(1.0);
        cs.q = q;
        const double r0 = compute_R0(cs, m).R0;
        CHECK(r0 > prev);
        CHECK(r0 > 1.0);
        prev = r0;
    }
}

TEST_CASE("small infected diffusion approaches the downstream ratio") {
    const Mesh m = build_mesh(1.0, 1000, Grading::geometric(0.995));
    double prev = INFINITY;
    for (double dI : {1e-1, 1e-2, 1e-3}) {
        CoefficientSet cs = cs_c(1.0);
        cs.dI = dI;
        const ThresholdReport r = compute_R0(cs, m);
        const double target = r.S_hat.back() * cs.beta.eval(1.0) / cs.gamma.eval(1.0);
        const double err = std::abs(r.R0 - target) / target;
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev <= 0.02);
}

TEST_CASE("auxiliary eigenvalue in the mass") {
    const CoefficientSet cs = make_coefficients("1", "1", "1", "2", 1.0, 1.0, 1.0, 1.0);
    const Mesh m = build_mesh(1.0, 1000);
    CHECK(tau1(0.0, cs, m, BcVariant::Paper).value > 0.0);
    for (const CoefficientSet& c : {cs, cs_c(1e-3)}) {
        double prev = INFINITY;
        for (double n : {0.0, 0.5, 1.0, 2.0, 4.0}) {
            const double t = tau1(n, c, m, BcVariant::Derived).value;
            CHECK(t < prev);
            prev = t;
        }
    }
    CHECK(tau1(1e3, cs_c(1e-3), m, BcVariant::Paper).value < 0.0);
    CHECK_THROWS_AS(tau1(1.0, cs_a(), m, BcVariant::Paper), HypothesisError);
    CHECK_THROWS_AS(parse_bc_variant("both"), ConfigError);
}

TEST_CASE("critical mass") {
    const CoefficientSet cs = make_coefficients("1", "1", "1", "2", 1.0, 1.0, 1.0, 1.0);
    const Mesh m = build_mesh(1.0, 1000);
    const auto n0 = find_N0(cs, m, BcVariant::Derived);
    REQUIRE(n0.has_value());
    // bisection on a uniform 8000-cell grid gives 0.75330520807438; the Robin end is first order
    CHECK(std::abs(*n0 - 0.75330520807438) <= 1e-3 * 0.7533);
    CHECK(std::abs(tau1(*n0, cs, m, BcVariant::Derived).value) <= 1e-9);
    CHECK(tau1(*n0 / 2, cs, m, BcVariant::Derived).value > 0.0);
    CHECK(tau1(*n0 * 2, cs, m, BcVariant::Derived).value < 0.0);

    CHECK_FALSE(find_N0(cs_c(1e-3), m, BcVariant::Derived).has_value());
}

TEST_CASE("lambda bar is tau1 at the transport-limit mass") {
    const Mesh m = build_mesh(1.0, 400, Grading::geometric(0.995));
    for (BcVariant v : {BcVariant::Paper, BcVariant::Derived}) {
        const CoefficientSet cs = cs_c(1e-3);
        const double ns = solve_dfe_singular(cs, m).N_S;
        CHECK(lambda_bar(cs, m, v) == tau1(ns, cs, m, v).value);
    }
}
