#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "sislab/coefficients.hpp"
#include "sislab/dynamics.hpp"

namespace sislab {

/// Constant data with Lambda = mu = gamma = m = 1, q = 0, dS = dI = 1.
CoefficientSet cs_a(double beta = 3.0);

/// Exponential source on [0,1]: q = dS = dI = 1, mu = gamma = 1,
/// Lambda = e^x, beta = 1 + e^{-x}.
CoefficientSet cs_b(double m);

/// Heterogeneous set on [0,1] with increasing Lambda and decreasing mu, q = dI = m = 1.
CoefficientSet cs_c(double dS);

/// CS-A levels with beta = 3 + sin(2 pi x) and q = 1; dI is the free parameter.
CoefficientSet cs_a_het(double dI);

struct RandomConfigOptions {
    bool equal_diffusion = false;  // dI = dS
    double q_max = 3.0;
    double beta_lo = 0.05;  // beta level drawn log-uniform in [beta_lo, beta_hi]
    double beta_hi = 20.0;
    double peclet_max = std::numeric_limits<double>::infinity();  // q L / min(dS, dI) capped by lowering q
};

/// Uniform double in [0,1) from the top 53 bits, identical on every standard library.
double unit_draw(std::mt19937_64& rng);

/// Deterministic family of valid coefficient sets. Each coefficient is
/// a (1 + b sin(k x + p)) with |b| < 0.6, so positivity holds on any interval.
std::vector<CoefficientSet> random_configs(std::uint64_t seed, std::size_t count,
                                           const RandomConfigOptions& opts = {});

/// Positive initial state of the same wavy family: S level in [0.2, 3],
/// I level log-uniform in [0.01, 2].
StateField random_initial_state(std::uint64_t seed, const Mesh& mesh);

}  // namespace sislab
