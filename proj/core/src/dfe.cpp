#include "sislab/dfe.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "sislab/banded.hpp"
#include "sislab/error.hpp"

namespace sislab {

DfeResult solve_dfe(const CoefficientSet& cs, const Mesh& mesh, LinearSolver solver) {
    validate(cs, mesh);
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const TridiagonalOperator A = assemble_operator(mesh, cs.dS, cs.q, c.mu);
    const std::size_t n = mesh.size();

    DfeResult r;
    std::function<Field(std::span<const double>)> solve;
    std::optional<BandedLU> lu;
    if (solver == LinearSolver::Thomas) {
        solve = [&](std::span<const double> b) {
            return solve_tridiagonal(A.lower, A.diag, A.upper, b);
        };
    } else {
        BandedMatrix M(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            M.at(i, i) = A.diag[i];
            if (i > 0) M.at(i, i - 1) = A.lower[i];
            if (i + 1 < n) M.at(i, i + 1) = A.upper[i];
        }
        lu.emplace(M);
        solve = [&](std::span<const double> b) { return lu->solve(b); };
    }
    r.S_hat = solve(c.Lambda);
    // refinement against the flux-form residual restores the exact mass balance
    for (int k = 0; k < 3; ++k) {
        const Field res = flux_form_residual(mesh, cs.dS, cs.q, c.mu, r.S_hat, c.Lambda);
        const Field corr = solve(res);
        for (std::size_t i = 0; i < n; ++i) r.S_hat[i] += corr[i];
    }

    if (!all_positive(r.S_hat)) throw InvariantError("disease-free profile is not positive");
    const double total = integrate(mesh, c.Lambda);
    r.mass_residual = std::abs(integrate(mesh, r.S_hat, c.mu) - total);
    if (r.mass_residual > 1e-10 * total) {
        throw InvariantError("disease-free mass identity violated: residual " +
                             num(r.mass_residual));
    }
    return r;
}

SingularDfeResult solve_dfe_singular(const CoefficientSet& cs, const Mesh& mesh) {
    if (!(cs.q > 0.0)) throw HypothesisError("transport limit requires q > 0");
    validate(cs, mesh);
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const std::size_t n = mesh.size();

    SingularDfeResult r;
    r.S_inf.resize(n);
    r.S_faces.resize(n + 1);
    r.S_faces[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double eq = c.Lambda[i] / c.mu[i];
        const double k = c.mu[i] / cs.q;
        const double left = r.S_faces[i] - eq;
        r.S_inf[i] = eq + left * std::exp(-0.5 * k * mesh.widths[i]);
        r.S_faces[i + 1] = eq + left * std::exp(-k * mesh.widths[i]);
    }
    r.mu_L = cs.mu.eval(cs.L);
    r.N_S = (integrate(mesh, c.Lambda) - integrate(mesh, r.S_inf, c.mu)) / r.mu_L;
    return r;
}

}  // namespace sislab
