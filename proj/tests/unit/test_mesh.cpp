#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "sislab/error.hpp"
#include "sislab/mesh.hpp"

using namespace sislab;

namespace {

double row_scale(const TridiagonalOperator& A, const Field& u, std::size_t i) {
    double s = std::abs(A.diag[i] * u[i]);
    if (i > 0) s += std::abs(A.lower[i] * u[i - 1]);
    if (i + 1 < A.size()) s += std::abs(A.upper[i] * u[i + 1]);
    return s;
}

Field exp_field(const Mesh& mesh, double rate) {
    Field u(mesh.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(rate * mesh.centers[i]);
    return u;
}

}  // namespace

TEST_CASE("uniform widths") {
    const Mesh m = build_mesh(1.0, 10);
    REQUIRE(m.size() == 10);
    for (double h : m.widths) CHECK(h == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(m.faces.front() == 0.0);
    CHECK(m.faces.back() == 1.0);
}

TEST_CASE("geometric widths shrink toward the right end") {
    const Mesh m = build_mesh(1.0, 10, Grading::geometric(0.9));
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        CHECK(m.widths[i + 1] / m.widths[i] == doctest::Approx(0.9).epsilon(1e-12));
    }
    const double sum = std::accumulate(m.widths.begin(), m.widths.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(m.faces.back() == 1.0);
}

TEST_CASE("uniform centres on [0, 2]") {
    const Mesh m = build_mesh(2.0, 8);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(m.centers[i] == doctest::Approx(0.125 + 0.25 * i).epsilon(1e-15));
    }
}

TEST_CASE("mesh parameter validation") {
    CHECK_THROWS_AS(build_mesh(1.0, 7), ConfigError);
    CHECK_THROWS_AS(build_mesh(0.0, 10), ConfigError);
    CHECK_THROWS_AS(build_mesh(1.0, 10, Grading::geometric(0.8)), ConfigError);
    CHECK_THROWS_AS(build_mesh(1.0, 10, Grading::geometric(1.25)), ConfigError);
    CHECK_NOTHROW(build_mesh(1.0, 10, Grading::geometric(1.1)));
}

TEST_CASE("mesh invariants over gradings") {
    for (double r : {0.81, 0.9, 0.99, 0.995, 1.0, 1.01, 1.2}) {
        for (int N : {8, 100, 2000}) {
            if (std::abs(N * std::log(r)) > 34.5) {
                CHECK_THROWS_AS(build_mesh(3.0, N, Grading::geometric(r)), ConfigError);
                continue;
            }
            const Mesh m = build_mesh(3.0, N, Grading::geometric(r));
            CHECK(m.faces.front() == 0.0);
            CHECK(m.faces.back() == 3.0);
            for (std::size_t i = 0; i < m.size(); ++i) REQUIRE(m.faces[i + 1] > m.faces[i]);
            const double sum = std::accumulate(m.widths.begin(), m.widths.end(), 0.0);
            CHECK(std::abs(sum - 3.0) <= 1e-12 * 3.0);
        }
    }
}

TEST_CASE("pure diffusion annihilates constants") {
    const Mesh m = build_mesh(1.0, 10);
    const TridiagonalOperator A = assemble_operator(m, 1.0, 0.0);
    const Field r = A.apply(Field(10, 1.0));
    for (double v : r) CHECK(std::abs(v) <= 1e-12);
    // interior rows are the 3-point Laplacian
    CHECK(A.diag[5] == doctest::Approx(200.0));
    CHECK(A.lower[5] == doctest::Approx(-100.0));
    CHECK(A.upper[5] == doctest::Approx(-100.0));
    CHECK(A.diag[0] == doctest::Approx(100.0));
}

TEST_CASE("exponential kernel is exact") {
    const Mesh m = build_mesh(1.0, 50);
    const TridiagonalOperator A = assemble_operator(m, 1.0, 1.0);
    const Field u = exp_field(m, 1.0);
    const Field r = A.apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(r[i]) <= 1e-12 * row_scale(A, u, i));
}

TEST_CASE("constant potential shifts the kernel") {
    const Mesh m = build_mesh(1.0, 50);
    const Field c(50, 0.7);
    const TridiagonalOperator A = assemble_operator(m, 1.0, 1.0, c);
    const Field u = exp_field(m, 1.0);
    const Field r = A.apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(r[i] - 0.7 * u[i]) <= 1e-12 * row_scale(A, u, i));
}

TEST_CASE("exponential exactness over a random sweep") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logd(-2.0, 1.0), ratio(0.0, 40.0);
    for (int k = 0; k < 200; ++k) {
        const double d = std::pow(10.0, logd(rng));
        const double q = ratio(rng) * d;  // q L / d up to 40
        const int N = 8 + static_cast<int>(rng() % 400);
        const double r = (rng() % 2) ? 1.0 : std::max(0.81, std::exp(-20.0 / N * static_cast<double>(rng() % 100) / 100.0));
        const Mesh m = build_mesh(1.0, N, Grading::geometric(r));
        const TridiagonalOperator A = assemble_operator(m, d, q);
        const Field u = exp_field(m, q / d);
        const Field res = A.apply(u);
        for (std::size_t i = 0; i < u.size(); ++i) {
            REQUIRE(std::abs(res[i]) <= 1e-12 * row_scale(A, u, i));
        }
    }
}

TEST_CASE("discrete conservation") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const Mesh m = build_mesh(2.0, 200, Grading::geometric(0.99));
        const double d = 0.1 + std::abs(U(rng));
        const double q = 5.0 * std::abs(U(rng));
        const TridiagonalOperator A = assemble_operator(m, d, q);
        Field u(m.size());
        for (double& v : u) v = U(rng);
        double anorm = 0.0;
        for (std::size_t i = 0; i < A.size(); ++i) {
            anorm = std::max(anorm, std::abs(A.lower[i]) + std::abs(A.diag[i]) + std::abs(A.upper[i]));
        }
        const double total = integrate(m, A.apply(u));
        CHECK(std::abs(total) <= 1e-12 * anorm * sup_norm(u));
    }
}

TEST_CASE("second-order consistency on uniform meshes") {
    // -d u'' + q u' for u = sin(2x) + x^2, interior cells
    const double d = 0.7, q = 2.0;
    auto exact = [&](double x) { return -d * (-4.0 * std::sin(2 * x) + 2.0) + q * (2.0 * std::cos(2 * x) + 2 * x); };
    std::vector<double> logh, loge;
    for (int N : {100, 200, 400, 800}) {
        const Mesh m = build_mesh(1.0, N);
        const TridiagonalOperator A = assemble_operator(m, d, q);
        Field u(m.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double x = m.centers[i];
            u[i] = std::sin(2 * x) + x * x;
        }
        const Field r = A.apply(u);
        double err = 0.0;
        for (std::size_t i = 1; i + 1 < u.size(); ++i) {
            err = std::max(err, std::abs(r[i] - exact(m.centers[i])));
        }
        logh.push_back(std::log(1.0 / N));
        loge.push_back(std::log(err));
    }
    const double mh = std::accumulate(logh.begin(), logh.end(), 0.0) / 4;
    const double me = std::accumulate(loge.begin(), loge.end(), 0.0) / 4;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 4; ++i) {
        num += (logh[i] - mh) * (loge[i] - me);
        den += (logh[i] - mh) * (logh[i] - mh);
    }
    CHECK(num / den >= 1.8);
}

TEST_CASE("midpoint integration") {
    const Mesh m1 = build_mesh(1.0, 10);
    CHECK(integrate(m1, Field(10, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));

    const Mesh m = build_mesh(1.0, 1000);
    CHECK(std::abs(integrate(m, m.centers) - 0.5) <= 1e-15);

    const Mesh m2 = build_mesh(1.0, 2000);
    const Field e = exp_field(m2, 1.0);
    CHECK(std::abs(integrate(m2, e, e) - (std::exp(2.0) - 1.0) / 2.0) <= 1e-6);

    CHECK_THROWS_AS(integrate(m, Field(3, 1.0)), ConfigError);
    CHECK_THROWS_AS(integrate(m, m.centers, Field(3, 1.0)), ConfigError);
}

TEST_CASE("symmetric form is similar to the operator") {
    const Mesh m = build_mesh(1.0, 60, Grading::geometric(0.97));
    const Field c(60, 0.3);
    const TridiagonalOperator A = assemble_operator(m, 0.5, 3.0, c);
    const SymmetricTridiagonal T = symmetrize(m, A);
    for (std::size_t i = 0; i + 1 < A.size(); ++i) {
        const double di = std::exp(T.log_scale[i]);
        const double dj = std::exp(T.log_scale[i + 1]);
        CHECK(T.off[i] == doctest::Approx(di * A.upper[i] / dj).epsilon(1e-12));
        CHECK(T.off[i] == doctest::Approx(dj * A.lower[i + 1] / di).epsilon(1e-12));
    }
    // the kernel image has residual equal to the potential
    const Field z = to_symmetric(T, exp_field(m, 3.0 / 0.5));
    const Field tz = T.apply(z);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::abs(tz[i] - 0.3 * z[i]) <= 1e-10 * sup_norm(tz));
    const Field back = to_physical(T, z);
    const Field w = exp_field(m, 6.0);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(back[i] == doctest::Approx(w[i] / w.back()).epsilon(1e-12));
}

TEST_CASE("symmetric form survives extreme Peclet numbers") {
    const Mesh m = build_mesh(1.0, 100);
    const TridiagonalOperator A = assemble_operator(m, 1e-4, 200.0);
    const SymmetricTridiagonal T = symmetrize(m, A);
    for (double v : T.off) CHECK(std::isfinite(v));
    for (double v : T.log_scale) CHECK(std::isfinite(v));
}
