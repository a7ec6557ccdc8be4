#pragma once

#include "sislab/coefficients.hpp"
#include "sislab/field.hpp"
#include "sislab/mesh.hpp"

namespace sislab {

struct DfeResult {
    Field S_hat;
    double mass_residual = 0.0;  // |int mu S_hat - int Lambda|
};

enum class LinearSolver { BandedLU, Thomas };

/// Disease-free susceptible profile: (-dS d_xx + q d_x + mu) S = Lambda with
/// zero-flux ends. Throws InvariantError if the result is not positive or the
/// mass identity fails by more than 1e-10 int Lambda.
DfeResult solve_dfe(const CoefficientSet& cs, const Mesh& mesh,
                    LinearSolver solver = LinearSolver::BandedLU);

struct SingularDfeResult {
    Field S_inf;    // cell centres
    Field S_faces;  // face values, S_faces[0] = 0
    double N_S = 0.0;
    double mu_L = 0.0;  // mu evaluated at x = L
};

/// Transport limit -q S' + Lambda - mu S = 0, S(0) = 0, integrated cell by cell
/// with an exact exponential update (coefficients frozen at cell centres), and
/// the mass N_S = (int Lambda - int mu S) / mu(L). Throws HypothesisError for q = 0.
SingularDfeResult solve_dfe_singular(const CoefficientSet& cs, const Mesh& mesh);

}  // namespace sislab
