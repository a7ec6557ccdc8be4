#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sislab/coefficients.hpp"
#include "sislab/mesh.hpp"
#include "sislab/spectral.hpp"

namespace sislab {

enum class ExperimentKind { QInfty, DsZero, DiZero, DsInfty, DiInfty, MInfty, R0Limits, Stability, Verify };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view s);

struct MeshSpec {
    double L = 1.0;
    int cells = 400;
    Grading grading;
};

struct TimeSpec {
    double dt = 0.01;
    double t_end = 50.0;
    double output_every = 1.0;
};

struct SolverSpec {
    double newton_tol = 1e-10;
    double eig_tol = 1e-12;
    BcVariant bc_variant = BcVariant::Derived;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Verify;
    std::vector<double> ladder;  // empty: the kind's default ladder
    std::optional<double> tolerance;
};

/// Fully resolved run configuration.
struct RunConfig {
    CoefficientSet coeffs;
    MeshSpec mesh;
    std::string initial_S = "1";
    std::string initial_I = "0.1";
    TimeSpec time;
    SolverSpec solver;
    ExperimentSpec experiment;
    std::string canonical;  // merged configuration as sorted, compact JSON
    std::uint64_t hash = 0;  // FNV-1a of `canonical`
};

/// Merges `json_text` over the defaults, applies `key.path=value` overrides in
/// order (value parsed as JSON when possible, else taken as a string), then
/// `cells`. Unknown keys, wrong types and invalid values throw ConfigError.
RunConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides = {},
                       std::optional<int> cells = std::nullopt);

/// As parse_config, reading the file at `path` (defaults only when empty).
RunConfig load_config(const std::optional<std::string>& path,
                      const std::vector<std::string>& overrides = {},
                      std::optional<int> cells = std::nullopt);

Mesh make_mesh(const MeshSpec& spec);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace sislab
