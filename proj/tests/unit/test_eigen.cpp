#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sislab/banded.hpp"
#include "sislab/eigen.hpp"
#include "sislab/error.hpp"
#include "sislab/mesh.hpp"

using namespace sislab;

namespace {

double quotient(const Field& a, const Field& b, const Field& m, const Field& v) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        num += a[i] * v[i] * v[i];
        if (i + 1 < v.size()) num += 2.0 * b[i] * v[i] * v[i + 1];
        den += m[i] * v[i] * v[i];
    }
    return num / den;
}

// generalized form h*A of the Neumann Laplacian on a uniform mesh, mass h
void neumann(int N, Field& a, Field& b, Field& m) {
    const Mesh mesh = build_mesh(1.0, N);
    const TridiagonalOperator A = assemble_operator(mesh, 1.0, 0.0);
    a.resize(N);
    b.resize(N - 1);
    m = mesh.widths;
    for (int i = 0; i < N; ++i) a[i] = A.diag[i] * mesh.widths[i];
    for (int i = 0; i + 1 < N; ++i) b[i] = A.upper[i] * mesh.widths[i];
}

}  // namespace

TEST_CASE("diagonal operator") {
    const Field a{-2, -2, -2}, b{0, 0}, m{1, 1, 1};
    const EigenResult r = principal_generalized_eig(a, b, m, EigMode::Smallest);
    CHECK(r.value == doctest::Approx(-2.0).epsilon(1e-15));
    for (double v : r.vector) CHECK(v == doctest::Approx(1.0 / std::sqrt(3.0)));
}

TEST_CASE("Neumann Laplacian has a constant ground state") {
    Field a, b, m;
    neumann(100, a, b, m);
    const EigenResult r = principal_generalized_eig(a, b, m, EigMode::Smallest);
    CHECK(std::abs(r.value) <= 1e-10);
    for (double v : r.vector) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));  // v^T M v = 1 on [0,1]
    CHECK(r.residual <= 1e-12);
}

TEST_CASE("second Neumann eigenvalue by deflation") {
    Field a, b, m;
    const int N = 1000;
    neumann(N, a, b, m);
    // uniform mesh: M = h I, so work with K/h directly
    const double h = m[0];
    Field ad(N), bd(N - 1);
    for (int i = 0; i < N; ++i) ad[i] = a[i] / h;
    for (int i = 0; i + 1 < N; ++i) bd[i] = b[i] / h;
    const EigenResult g = principal_generalized_eig(ad, bd, Field(N, 1.0), EigMode::Smallest);

    BandedMatrix S(N, 1);
    const double shift = 9.0;
    for (int i = 0; i < N; ++i) {
        S.at(i, i) = ad[i] - shift;
        if (i + 1 < N) {
            S.at(i, i + 1) = bd[i];
            S.at(i + 1, i) = bd[i];
        }
    }
    const BandedLU lu(S);
    Field y(N);
    for (int i = 0; i < N; ++i) y[i] = std::cos(3.0 * (i + 0.5) / N);
    double lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
        double p = 0.0;
        for (int i = 0; i < N; ++i) p += y[i] * g.vector[i];
        for (int i = 0; i < N; ++i) y[i] -= p * g.vector[i];
        y = lu.solve(y);
        double nrm = 0.0;
        for (double v : y) nrm += v * v;
        for (double& v : y) v /= std::sqrt(nrm);
        lambda = quotient(ad, bd, Field(N, 1.0), y);
    }
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(lambda - pi2) <= 1e-3 * pi2);
}

TEST_CASE("Rayleigh quotient optimality") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.2, 2.0);
    const int N = 60;
    Field a, b, m;
    neumann(N, a, b, m);
    Field c(N), w(N);
    for (int i = 0; i < N; ++i) {
        c[i] = P(rng);
        w[i] = P(rng) * m[i];
        a[i] += c[i] * m[i];
    }
    const EigenResult lo = principal_generalized_eig(a, b, w, EigMode::Smallest);
    const EigenResult hi = principal_generalized_eig(a, b, w, EigMode::Largest);
    CHECK(hi.value == doctest::Approx(1.0 / lo.value).epsilon(1e-10));
    for (int k = 0; k < 100; ++k) {
        Field v(N);
        for (double& x : v) x = U(rng);
        const double rq = quotient(a, b, w, v);
        CHECK(lo.value <= rq * (1 + 1e-12));
        CHECK(hi.value >= (1.0 / rq) * (1 - 1e-12));
    }
    double norm = 0.0;
    for (int i = 0; i < N; ++i) norm += w[i] * lo.vector[i] * lo.vector[i];
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    for (double x : lo.vector) CHECK(x > 0.0);
}

TEST_CASE("determinism") {
    Field a, b, m;
    neumann(300, a, b, m);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += std::sin(0.1 * i) * m[i];
    const EigenResult r1 = principal_generalized_eig(a, b, m, EigMode::Smallest);
    const EigenResult r2 = principal_generalized_eig(a, b, m, EigMode::Smallest);
    CHECK(r1.value == r2.value);
    CHECK(r1.vector == r2.vector);
    CHECK(r1.iterations == r2.iterations);
}

TEST_CASE("largest mode needs a positive definite denominator") {
    const Field a{-1, 2, 2}, b{-0.5, -0.5}, m{1, 1, 1};
    CHECK_THROWS_AS(principal_generalized_eig(a, b, m, EigMode::Largest), SolverError);
    CHECK_THROWS_AS(principal_generalized_eig(a, b, Field{1, 0, 1}, EigMode::Smallest), ConfigError);
}

TEST_CASE("sturm count") {
    const Field a{1, 2, 3}, b{0, 0};
    CHECK(sturm_count(a, b, 0.5) == 0);
    CHECK(sturm_count(a, b, 2.5) == 2);
    CHECK(sturm_count(a, b, 10.0) == 3);
}
