#pragma once

#include <string_view>

#include "sislab/expr.hpp"
#include "sislab/field.hpp"
#include "sislab/mesh.hpp"

namespace sislab {

/// Model data. Lambda: birth, mu: death, beta: transmission, gamma: recovery.
struct CoefficientSet {
    CoeffExpr Lambda = CoeffExpr::number(1.0);
    CoeffExpr mu = CoeffExpr::number(1.0);
    CoeffExpr beta = CoeffExpr::number(1.0);
    CoeffExpr gamma = CoeffExpr::number(1.0);
    double dS = 1.0;
    double dI = 1.0;
    double q = 0.0;
    double m = 1.0;
    double L = 1.0;
};

/// Builds a set from expression strings.
CoefficientSet make_coefficients(std::string_view Lambda, std::string_view mu,
                                 std::string_view beta, std::string_view gamma, double dS,
                                 double dI, double q, double m, double L = 1.0);

/// Expression at every cell centre. Throws ConfigError on a non-finite value.
Field sample_on_mesh(const CoeffExpr& expr, const Mesh& mesh);

/// As sample_on_mesh, additionally requiring every sample to be > 0.
Field sample_positive(const CoeffExpr& expr, const Mesh& mesh, std::string_view name);

struct Extrema {
    double f_star;  // max
    double f_sub;   // min
};

/// Max and min over cell centres and both endpoints.
Extrema extrema(const CoeffExpr& expr, const Mesh& mesh);

/// Checks the scalar constraints and positivity of the four coefficient
/// fields on `mesh` (including the endpoints). Throws ConfigError.
void validate(const CoefficientSet& cs, const Mesh& mesh);

/// The four coefficient fields sampled on a mesh.
struct SampledCoefficients {
    Field Lambda;
    Field mu;
    Field beta;
    Field gamma;
};

SampledCoefficients sample_coefficients(const CoefficientSet& cs, const Mesh& mesh);

}  // namespace sislab
