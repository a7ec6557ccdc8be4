#include "sislab/suite.hpp"

#include <algorithm>

#include <cmath>
#include <cstdio>
#include <string>

namespace sislab {

CoefficientSet cs_a(double beta) {
    CoefficientSet cs;
    cs.beta = CoeffExpr::number(beta);
    return cs;
}

CoefficientSet cs_b(double m) {
    return make_coefficients("exp(x)", "1", "1 + exp(-x)", "1", 1.0, 1.0, 1.0, m);
}

CoefficientSet cs_c(double dS) {
    return make_coefficients("1 + x", "1.5 - x", "2 + 0.5*sin(3*x)", "1 + 0.5*cos(2*x)", dS, 1.0,
                             1.0, 1.0);
}

CoefficientSet cs_a_het(double dI) {
    return make_coefficients("1", "1", "3 + sin(6.283185307179586*x)", "1", 1.0, dI, 1.0, 1.0);
}

double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

namespace {

double draw(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_draw(rng); }

double log_draw(std::mt19937_64& rng, double lo, double hi) {
    return std::exp(draw(rng, std::log(lo), std::log(hi)));
}

CoeffExpr wavy(std::mt19937_64& rng, double level) {
    const double b = draw(rng, -0.6, 0.6);
    const double k = draw(rng, 0.5, 6.0);
    const double p = draw(rng, 0.0, 6.283185307179586);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g*(1 + %.17g*sin(%.17g*x + %.17g))", level, b, k, p);
    return parse_expr(buf);
}

}  // namespace

std::vector<CoefficientSet> random_configs(std::uint64_t seed, std::size_t count,
                                           const RandomConfigOptions& opts) {
    std::mt19937_64 rng(seed);
    std::vector<CoefficientSet> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        CoefficientSet cs;
        cs.L = draw(rng, 0.5, 2.0);
        cs.Lambda = wavy(rng, draw(rng, 0.5, 2.0));
        cs.mu = wavy(rng, draw(rng, 0.5, 2.0));
        cs.beta = wavy(rng, log_draw(rng, opts.beta_lo, opts.beta_hi));
        cs.gamma = wavy(rng, draw(rng, 0.5, 2.0));
        cs.dS = log_draw(rng, 0.05, 5.0);
        cs.dI = opts.equal_diffusion ? cs.dS : log_draw(rng, 0.05, 5.0);
        cs.q = std::min(draw(rng, 0.0, opts.q_max), opts.peclet_max * std::min(cs.dS, cs.dI) / cs.L);
        cs.m = log_draw(rng, 0.2, 5.0);
        out.push_back(std::move(cs));
    }
    return out;
}

StateField random_initial_state(std::uint64_t seed, const Mesh& mesh) {
    std::mt19937_64 rng(seed);
    StateField s;
    s.S = sample_positive(wavy(rng, draw(rng, 0.2, 3.0)), mesh, "initial S");
    s.I = sample_positive(wavy(rng, log_draw(rng, 0.01, 2.0)), mesh, "initial I");
    return s;
}

}  // namespace sislab
