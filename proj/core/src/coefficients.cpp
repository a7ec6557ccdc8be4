#include "sislab/coefficients.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "sislab/error.hpp"

namespace sislab {

namespace {

std::string where(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " at x = %.17g", x);
    return buf;
}

void check_value(double v, double x, std::string_view name, bool positive) {
    if (!std::isfinite(v)) {
        throw ConfigError(std::string(name) + " is not finite" + where(x));
    }
    if (positive && !(v > 0.0)) {
        throw ConfigError(std::string(name) + " is not positive" + where(x));
    }
}

}  // namespace

CoefficientSet make_coefficients(std::string_view Lambda, std::string_view mu,
                                 std::string_view beta, std::string_view gamma, double dS,
                                 double dI, double q, double m, double L) {
    CoefficientSet cs;
    cs.Lambda = parse_expr(Lambda);
    cs.mu = parse_expr(mu);
    cs.beta = parse_expr(beta);
    cs.gamma = parse_expr(gamma);
    cs.dS = dS;
    cs.dI = dI;
    cs.q = q;
    cs.m = m;
    cs.L = L;
    return cs;
}

Field sample_on_mesh(const CoeffExpr& expr, const Mesh& mesh) {
    Field out(mesh.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = expr.eval(mesh.centers[i]);
        check_value(out[i], mesh.centers[i], "expression", false);
    }
    return out;
}

Field sample_positive(const CoeffExpr& expr, const Mesh& mesh, std::string_view name) {
    Field out(mesh.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = expr.eval(mesh.centers[i]);
        check_value(out[i], mesh.centers[i], name, true);
    }
    return out;
}

Extrema extrema(const CoeffExpr& expr, const Mesh& mesh) {
    const Field s = sample_on_mesh(expr, mesh);
    const double a = expr.eval(0.0);
    const double b = expr.eval(mesh.L);
    check_value(a, 0.0, "expression", false);
    check_value(b, mesh.L, "expression", false);
    Extrema e{std::max(a, b), std::min(a, b)};
    for (double v : s) {
        e.f_star = std::max(e.f_star, v);
        e.f_sub = std::min(e.f_sub, v);
    }
    return e;
}

void validate(const CoefficientSet& cs, const Mesh& mesh) {
    auto pos = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be > 0");
    };
    pos(cs.dS, "dS");
    pos(cs.dI, "dI");
    pos(cs.m, "m");
    pos(cs.L, "L");
    if (!(cs.q >= 0.0) || !std::isfinite(cs.q)) throw ConfigError("q must be >= 0");
    if (std::abs(mesh.L - cs.L) > 1e-12 * cs.L) throw ConfigError("mesh length differs from L");

    const std::pair<const CoeffExpr*, const char*> fields[] = {
        {&cs.Lambda, "Lambda"}, {&cs.mu, "mu"}, {&cs.beta, "beta"}, {&cs.gamma, "gamma"}};
    for (const auto& [e, name] : fields) {
        sample_positive(*e, mesh, name);
        check_value(e->eval(0.0), 0.0, name, true);
        check_value(e->eval(cs.L), cs.L, name, true);
    }
}

SampledCoefficients sample_coefficients(const CoefficientSet& cs, const Mesh& mesh) {
    return {sample_positive(cs.Lambda, mesh, "Lambda"), sample_positive(cs.mu, mesh, "mu"),
            sample_positive(cs.beta, mesh, "beta"), sample_positive(cs.gamma, mesh, "gamma")};
}

}  // namespace sislab
