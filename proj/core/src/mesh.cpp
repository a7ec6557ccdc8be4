#include "sislab/mesh.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sislab/error.hpp"

namespace sislab {

Mesh build_mesh(double L, int N, Grading grading) {
    if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("mesh length must be positive");
    if (N < 8) throw ConfigError("mesh needs at least 8 cells, got " + std::to_string(N));
    if (grading.type == Grading::Type::Geometric &&
        !(grading.ratio > 0.8 && grading.ratio < 1.25)) {
        throw ConfigError("geometric grading ratio must lie in (0.8, 1.25)");
    }

    if (grading.type == Grading::Type::Geometric && std::abs(N * std::log(grading.ratio)) > 34.5) {
        throw ConfigError("geometric grading spans more than 15 decades of cell width");
    }

    Mesh mesh;
    mesh.L = L;
    mesh.grading = grading;
    const auto n = static_cast<std::size_t>(N);
    mesh.widths.resize(n);
    const double r = grading.type == Grading::Type::Geometric ? grading.ratio : 1.0;
    if (r == 1.0) {
        for (auto& h : mesh.widths) h = L / N;
    } else {
        // h0 (1 - r^N) / (1 - r) = L
        const double h0 = L * std::expm1(std::log(r)) / std::expm1(N * std::log(r));
        double h = h0;
        for (auto& w : mesh.widths) {
            w = h;
            h *= r;
        }
    }

    mesh.faces.resize(n + 1);
    mesh.faces[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mesh.faces[i + 1] = r == 1.0 ? L * static_cast<double>(i + 1) / N
                                     : mesh.faces[i] + mesh.widths[i];
    }
    mesh.faces[n] = L;
    mesh.centers.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        mesh.widths[i] = mesh.faces[i + 1] - mesh.faces[i];
        mesh.centers[i] = 0.5 * (mesh.faces[i] + mesh.faces[i + 1]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(mesh.widths[i] > 0.0)) {
            throw ConfigError("grading ratio too strong for this cell count: faces not increasing");
        }
    }
    return mesh;
}

double integrate(const Mesh& mesh, std::span<const double> u, std::span<const double> weight) {
    const std::size_t n = mesh.size();
    if (u.size() != n) throw ConfigError("integrate: field length does not match mesh");
    if (!weight.empty() && weight.size() != n) {
        throw ConfigError("integrate: weight length does not match mesh");
    }
    double s = 0.0;
    if (weight.empty()) {
        for (std::size_t i = 0; i < n; ++i) s += u[i] * mesh.widths[i];
    } else {
        for (std::size_t i = 0; i < n; ++i) s += u[i] * weight[i] * mesh.widths[i];
    }
    return s;
}

double bernoulli(double z) {
    if (z == 0.0) return 1.0;
    return z / std::expm1(z);
}

Field TridiagonalOperator::apply(std::span<const double> u) const {
    const std::size_t n = size();
    if (u.size() != n) throw ConfigError("operator apply: length mismatch");
    Field out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * u[i];
        if (i > 0) v += lower[i] * u[i - 1];
        if (i + 1 < n) v += upper[i] * u[i + 1];
        out[i] = v;
    }
    return out;
}

TridiagonalOperator assemble_operator(const Mesh& mesh, double d, double q,
                                      std::span<const double> potential) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError("diffusion rate must be positive");
    if (!(q >= 0.0) || !std::isfinite(q)) throw ConfigError("advection speed must be >= 0");
    const std::size_t n = mesh.size();
    if (!potential.empty() && potential.size() != n) {
        throw ConfigError("potential length does not match mesh");
    }

    TridiagonalOperator op;
    op.d = d;
    op.q = q;
    op.has_potential = !potential.empty();
    op.lower.assign(n, 0.0);
    op.diag.assign(n, 0.0);
    op.upper.assign(n, 0.0);

    // interior face between cells i and i+1: J = (d/delta) [B(-P) u_i - B(P) u_{i+1}]
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double delta = mesh.centers[i + 1] - mesh.centers[i];
        const double P = q * delta / d;
        const double a = d / delta * bernoulli(-P);
        const double b = d / delta * bernoulli(P);
        op.diag[i] += a / mesh.widths[i];
        op.upper[i] = -b / mesh.widths[i];
        op.diag[i + 1] += b / mesh.widths[i + 1];
        op.lower[i + 1] = -a / mesh.widths[i + 1];
    }
    if (!potential.empty()) {
        for (std::size_t i = 0; i < n; ++i) op.diag[i] += potential[i];
    }
    return op;
}

Field flux_form_residual(const Mesh& mesh, double d, double q, std::span<const double> potential,
                         std::span<const double> u, std::span<const double> rhs) {
    const std::size_t n = mesh.size();
    std::vector<long double> acc(n, 0.0L);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double delta = mesh.centers[i + 1] - mesh.centers[i];
        const double P = q * delta / d;
        const long double J = static_cast<long double>(d / delta) *
                              (static_cast<long double>(bernoulli(-P)) * u[i] -
                               static_cast<long double>(bernoulli(P)) * u[i + 1]);
        acc[i] += J;
        acc[i + 1] -= J;
    }
    Field r(n);
    for (std::size_t i = 0; i < n; ++i) {
        long double v = acc[i] / mesh.widths[i];
        if (!potential.empty()) v += static_cast<long double>(potential[i]) * u[i];
        r[i] = static_cast<double>(static_cast<long double>(rhs[i]) - v);
    }
    return r;
}

Field SymmetricTridiagonal::apply(std::span<const double> z) const {
    const std::size_t n = size();
    Field out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * z[i];
        if (i > 0) v += off[i - 1] * z[i - 1];
        if (i + 1 < n) v += off[i] * z[i + 1];
        out[i] = v;
    }
    return out;
}

SymmetricTridiagonal symmetrize(const Mesh& mesh, const TridiagonalOperator& op) {
    const std::size_t n = op.size();
    SymmetricTridiagonal s;
    s.diag = op.diag;
    s.off.assign(n > 0 ? n - 1 : 0, 0.0);
    s.log_scale.assign(n, 0.0);
    s.alpha.assign(n, 0.0);
    s.beta.assign(n, 0.0);
    if (n == 0) return s;
    s.log_scale[0] = 0.5 * std::log(mesh.widths[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double delta = mesh.centers[i + 1] - mesh.centers[i];
        const double P = op.q * delta / op.d;
        // sqrt(B(P) B(-P)) = (P/2) / sinh(P/2), written to avoid overflow
        const double g = P == 0.0 ? 1.0 : P * std::exp(-0.5 * P) / -std::expm1(-P);
        s.off[i] = -(op.d / delta) * g / std::sqrt(mesh.widths[i] * mesh.widths[i + 1]);
        s.alpha[i] = (op.d / delta) * bernoulli(-P) / mesh.widths[i];
        s.beta[i + 1] = (op.d / delta) * bernoulli(P) / mesh.widths[i + 1];
        s.log_scale[i + 1] = s.log_scale[i] +
                             0.5 * (std::log(mesh.widths[i + 1]) - std::log(mesh.widths[i])) -
                             0.5 * P;
    }
    return s;
}

namespace {

Field rescale_log(std::span<const double> v, std::span<const double> shift_log, double sign) {
    const std::size_t n = v.size();
    Field lg(n, -std::numeric_limits<double>::infinity());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] != 0.0) {
            lg[i] = std::log(std::abs(v[i])) + sign * shift_log[i];
            top = std::max(top, lg[i]);
        }
    }
    Field out(n, 0.0);
    if (!std::isfinite(top)) return out;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] != 0.0) out[i] = std::copysign(std::exp(lg[i] - top), v[i]);
    }
    return out;
}

}  // namespace

Field to_physical(const SymmetricTridiagonal& sym, std::span<const double> z) {
    return rescale_log(z, sym.log_scale, -1.0);
}

Field to_symmetric(const SymmetricTridiagonal& sym, std::span<const double> u) {
    return rescale_log(u, sym.log_scale, 1.0);
}

}  // namespace sislab
