#include "sislab/spectral.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sislab/error.hpp"

namespace sislab {

std::string to_string(BcVariant v) { return v == BcVariant::Paper ? "paper" : "derived"; }

BcVariant parse_bc_variant(std::string_view s) {
    if (s == "paper") return BcVariant::Paper;
    if (s == "derived") return BcVariant::Derived;
    throw ConfigError("bc_variant must be \"paper\" or \"derived\", got \"" + std::string(s) + "\"");
}

namespace {

FaceForm operator_form(const SymmetricTridiagonal& t0, std::span<const double> extra) {
    FaceForm K;
    K.alpha = t0.alpha;
    K.beta = t0.beta;
    K.off = t0.off;
    K.extra.assign(extra.begin(), extra.end());
    return K;
}

Field robin_diag(const Mesh& mesh, std::span<const double> potential,
                 const std::optional<RobinDatum>& robin) {
    const std::size_t n = mesh.size();
    Field e(n, 0.0);
    if (!potential.empty()) {
        if (potential.size() != n) throw ConfigError("potential length does not match mesh");
        for (std::size_t i = 0; i < n; ++i) e[i] = potential[i];
    }
    if (robin) {
        if (robin->side == RobinDatum::Side::Downstream) {
            e[n - 1] -= robin->coefficient / mesh.widths[n - 1];
        } else {
            e[0] += robin->coefficient / mesh.widths[0];
        }
    }
    return e;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

EigenResult lambda1(const Mesh& mesh, double d, double q, std::span<const double> potential,
                    std::optional<RobinDatum> robin, double tol) {
    const TridiagonalOperator A = assemble_operator(mesh, d, q);
    const SymmetricTridiagonal t0 = symmetrize(mesh, A);
    const FaceForm K = operator_form(t0, robin_diag(mesh, potential, robin));
    EigenResult r = principal_generalized_eig(K, Field(mesh.size(), 1.0), EigMode::Smallest, tol);
    r.vector = to_physical(t0, r.vector);
    return r;
}

ThresholdReport compute_R0_with(const CoefficientSet& cs, const Mesh& mesh,
                                std::span<const double> S_hat, double tol) {
    validate(cs, mesh);
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const std::size_t n = mesh.size();
    if (S_hat.size() != n) throw ConfigError("susceptible profile length does not match mesh");

    const TridiagonalOperator A = assemble_operator(mesh, cs.dI, cs.q);
    const SymmetricTridiagonal t0 = symmetrize(mesh, A);
    Field sb(n), pot(n);
    for (std::size_t i = 0; i < n; ++i) {
        sb[i] = S_hat[i] * c.beta[i];
        pot[i] = c.gamma[i] - sb[i];
    }

    ThresholdReport rep;
    rep.S_hat.assign(S_hat.begin(), S_hat.end());
    const FaceForm K = operator_form(t0, c.gamma);
    rep.r0_eig = principal_generalized_eig(K, sb, EigMode::Largest, tol);
    {
        const Field& z = rep.r0_eig.vector;
        Field szz(n);
        for (std::size_t i = 0; i < n; ++i) szz[i] = sb[i] * z[i];
        rep.r0_eig.value = dot(szz, z) / face_form_quotient(K, z);
        rep.r0_eig.vector = to_physical(t0, z);
    }
    rep.R0 = rep.r0_eig.value;
    rep.lambda1_eig = lambda1(mesh, cs.dI, cs.q, pot, std::nullopt, tol);
    rep.lambda1 = rep.lambda1_eig.value;

    const bool above = rep.R0 > 1.0;
    const bool below = rep.R0 < 1.0;
    rep.consistent = (above && rep.lambda1 < 0.0) || (below && rep.lambda1 > 0.0) ||
                     (!above && !below && rep.lambda1 == 0.0) ||
                     std::abs(rep.R0 - 1.0) <= 10.0 * tol;
    return rep;
}

ThresholdReport compute_R0(const CoefficientSet& cs, const Mesh& mesh, double tol) {
    const DfeResult dfe = solve_dfe(cs, mesh);
    return compute_R0_with(cs, mesh, dfe.S_hat, tol);
}

double compute_R0_star(const CoefficientSet& cs, const Mesh& mesh, double tol) {
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const double level = integrate(mesh, c.Lambda) / integrate(mesh, c.mu);
    return compute_R0_with(cs, mesh, Field(mesh.size(), level), tol).R0;
}

double r0_trial_quotient(const CoefficientSet& cs, const Mesh& mesh,
                         std::span<const double> S_hat, std::span<const double> eta) {
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    const std::size_t n = mesh.size();
    const TridiagonalOperator A = assemble_operator(mesh, cs.dI, cs.q);
    const SymmetricTridiagonal t0 = symmetrize(mesh, A);
    // z = sqrt(h w) eta; log sqrt(h w) = log h - log D
    Field lz(n);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        lz[i] = std::log(mesh.widths[i]) - t0.log_scale[i];
        top = std::max(top, lz[i]);
    }
    Field z(n), sbz(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = eta[i] * std::exp(lz[i] - top);
        sbz[i] = S_hat[i] * c.beta[i] * z[i];
    }
    return dot(sbz, z) / face_form_quotient(operator_form(t0, c.gamma), z);
}

double tau1_robin_coefficient(double n, const CoefficientSet& cs, BcVariant variant) {
    double coef = n * cs.beta.eval(cs.L);
    if (variant == BcVariant::Paper) coef *= cs.mu.eval(cs.L);
    return coef;
}

EigenResult tau1(double n, const CoefficientSet& cs, const Mesh& mesh, BcVariant variant,
                 const SingularDfeResult& sdfe, double tol) {
    if (!(n >= 0.0)) throw ConfigError("tau1 needs n >= 0");
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    Field pot(mesh.size());
    for (std::size_t i = 0; i < pot.size(); ++i) pot[i] = c.gamma[i] - sdfe.S_inf[i] * c.beta[i];
    const RobinDatum robin{RobinDatum::Side::Downstream, tau1_robin_coefficient(n, cs, variant)};
    return lambda1(mesh, cs.dI, cs.q, pot, robin, tol);
}

EigenResult tau1(double n, const CoefficientSet& cs, const Mesh& mesh, BcVariant variant,
                 double tol) {
    return tau1(n, cs, mesh, variant, solve_dfe_singular(cs, mesh), tol);
}

std::optional<double> find_N0(const CoefficientSet& cs, const Mesh& mesh, BcVariant variant) {
    const SingularDfeResult sdfe = solve_dfe_singular(cs, mesh);
    const SampledCoefficients c = sample_coefficients(cs, mesh);
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        if (!(c.gamma[i] / c.beta[i] > sdfe.S_inf[i])) return std::nullopt;
    }
    auto f = [&](double n) { return tau1(n, cs, mesh, variant, sdfe).value; };

    double lo = 0.0, flo = f(0.0);
    double hi = 1.0, fhi = f(hi);
    int doublings = 0;
    while (!(fhi < 0.0)) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = f(hi);
        if (++doublings > 200) {
            throw SolverError("find_N0: no sign change up to n = " + num(hi) +
                              " (tau1 = " + num(fhi) + ")");
        }
    }
    if (!(flo > 0.0)) {
        throw SolverError("find_N0: bracket [" + num(lo) + ", " + num(hi) +
                          "] has tau1 values " + num(flo) + ", " + num(fhi));
    }
    double best = hi, fbest = fhi;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (std::abs(fm) < std::abs(fbest)) {
            best = mid;
            fbest = fm;
        }
        if (std::abs(fm) <= 1e-12) break;
        if (fm > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (std::abs(fbest) > 1e-9) {
        throw SolverError("find_N0: bisection stalled with tau1 = " + num(fbest));
    }
    return best;
}

double lambda_bar(const CoefficientSet& cs, const Mesh& mesh, BcVariant variant) {
    const SingularDfeResult sdfe = solve_dfe_singular(cs, mesh);
    return tau1(sdfe.N_S, cs, mesh, variant, sdfe).value;
}

}  // namespace sislab
