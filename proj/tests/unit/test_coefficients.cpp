#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "sislab/coefficients.hpp"
#include "sislab/error.hpp"

using namespace sislab;

TEST_CASE("sampling a constant") {
    const Mesh m = build_mesh(1.0, 17, Grading::geometric(0.95));
    for (double v : sample_on_mesh(parse_expr("1"), m)) CHECK(v == 1.0);
}

TEST_CASE("sampling x gives the cell centres") {
    const Mesh m = build_mesh(1.0, 8);
    const Field f = sample_on_mesh(parse_expr("x"), m);
    const double want[] = {0.0625, 0.1875, 0.3125, 0.4375, 0.5625, 0.6875, 0.8125, 0.9375};
    for (std::size_t i = 0; i < 8; ++i) CHECK(f[i] == want[i]);
}

TEST_CASE("sampling through a pole fails") {
    const Mesh m = build_mesh(1.0, 9);  // centre 4 is exactly 0.5
    REQUIRE(m.centers[4] == 0.5);
    CHECK_THROWS_AS(sample_on_mesh(parse_expr("1/(x-0.5)"), m), ConfigError);
    CHECK_THROWS_AS(sample_on_mesh(parse_expr("log(x - 0.5)"), m), ConfigError);
    CHECK_THROWS_AS(sample_positive(parse_expr("x - 0.5"), m, "mu"), ConfigError);
}

TEST_CASE("extrema include the endpoints") {
    const Mesh m = build_mesh(1.0, 10);
    const Extrema c = extrema(parse_expr("3"), m);
    CHECK(c.f_star == 3.0);
    CHECK(c.f_sub == 3.0);
    const Extrema lin = extrema(parse_expr("1 + x"), m);
    CHECK(lin.f_star == 2.0);
    CHECK(lin.f_sub == 1.0);
    const Extrema s = extrema(parse_expr("sin(3.14159265*x)"), build_mesh(1.0, 1000));
    CHECK(std::abs(s.f_star - 1.0) <= 1e-5);
    CHECK(std::abs(s.f_sub) <= 1e-5);
}

namespace {

std::string random_positive_expr(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.1, 3.0);
    const double a = U(rng), b = U(rng), k = U(rng) * 3;
    const double amp = 0.95 * a * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    char buf[256];
    switch (rng() % 4) {
        case 0: std::snprintf(buf, sizeof buf, "%.6g + %.6g*sin(%.6g*x)", a, amp, k); break;
        case 1: std::snprintf(buf, sizeof buf, "%.6g*exp(-%.6g*x) + %.6g", a, k, b); break;
        case 2: std::snprintf(buf, sizeof buf, "%.6g + %.6g*x^2", a, b); break;
        default: std::snprintf(buf, sizeof buf, "%.6g/(1 + %.6g*x)", a, b); break;
    }
    return buf;
}

}  // namespace

TEST_CASE("extrema bound every sample") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        const CoeffExpr e = parse_expr(random_positive_expr(rng));
        const Mesh m = build_mesh(2.0, 50 + static_cast<int>(rng() % 100), Grading::geometric(0.98));
        const Extrema x = extrema(e, m);
        for (double v : sample_on_mesh(e, m)) {
            CHECK(v <= x.f_star);
            CHECK(v >= x.f_sub);
        }
    }
}

TEST_CASE("validated coefficient sets stay positive under refinement") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 40; ++k) {
        CoefficientSet cs = make_coefficients(random_positive_expr(rng), random_positive_expr(rng),
                                              random_positive_expr(rng), random_positive_expr(rng),
                                              1.0, 0.5, 2.0, 1.0, 1.0);
        const int N = 40;
        validate(cs, build_mesh(1.0, N));
        for (int f = 2; f <= 4; ++f) {
            const SampledCoefficients s = sample_coefficients(cs, build_mesh(1.0, N * f));
            CHECK(all_positive(s.Lambda));
            CHECK(all_positive(s.mu));
            CHECK(all_positive(s.beta));
            CHECK(all_positive(s.gamma));
        }
    }
}

TEST_CASE("scalar validation") {
    const Mesh m = build_mesh(1.0, 10);
    CoefficientSet cs;
    CHECK_NOTHROW(validate(cs, m));
    cs.dS = 0.0;
    CHECK_THROWS_AS(validate(cs, m), ConfigError);
    cs = {};
    cs.q = -1.0;
    CHECK_THROWS_AS(validate(cs, m), ConfigError);
    cs = {};
    cs.m = 0.0;
    CHECK_THROWS_AS(validate(cs, m), ConfigError);
    cs = {};
    cs.beta = parse_expr("x - 0.2");
    CHECK_THROWS_AS(validate(cs, m), ConfigError);
    cs = {};
    cs.gamma = parse_expr("x");  // zero only at the endpoint x = 0
    CHECK_THROWS_AS(validate(cs, m), ConfigError);
}
