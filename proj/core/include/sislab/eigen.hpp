#pragma once

#include <cstddef>
#include <span>

#include "sislab/field.hpp"

namespace sislab {

struct EigenResult {
    double value = 0.0;
    Field vector;           // positive, normalised so that v^T M v = 1
    int iterations = 0;     // inverse-iteration steps
    double residual = 0.0;  // ||T y - theta y|| / ||T||, standard form, ||y|| = 1
};

enum class EigMode {
    Smallest,  // min v^T K v / v^T M v
    Largest,   // max v^T M v / v^T K v (K must be positive definite)
};

/// Symmetric tridiagonal matrix split by faces:
///   K_ii = extra_i + alpha_i + beta_i,  K_{i,i+1} = off_i,  alpha_i beta_{i+1} = off_i^2.
/// alpha_i is the share of face i+1/2 in row i, beta_i the share of face i-1/2.
/// For a discretised transport-diffusion operator `extra` is the reaction
/// potential and stays O(1) while alpha, beta grow like d/h^2, so pivots
/// computed on this form keep the small eigenvalues accurate.
struct FaceForm {
    Field alpha;  // alpha[n-1] = 0
    Field beta;   // beta[0] = 0
    Field off;    // size n-1
    Field extra;

    std::size_t size() const { return extra.size(); }
};

/// Face form of a plain symmetric tridiagonal (alpha_i = beta_{i+1} = |off_i|).
FaceForm face_form(std::span<const double> diag, std::span<const double> off);

/// y^T K y accumulated as sum extra_i y_i^2 + sum_f (sqrt(alpha_f) y_f -+ sqrt(beta_{f+1}) y_{f+1})^2.
double face_form_quotient(const FaceForm& K, std::span<const double> y);

/// Principal eigenpair of K v = lambda M v for diagonal M > 0.
///
/// The smallest eigenvalue of the standard form M^{-1/2} K M^{-1/2} is first
/// bracketed by Sturm-sequence bisection (pivots from the face form); the lower
/// end of the bracket is the shift for inverse iteration from the all-ones
/// vector. The value reported is the Rayleigh quotient of the final vector.
///
/// Throws SolverError after 10000 iterations without reaching `tol`, when the
/// converged vector changes sign, or (Largest) when K is not positive definite.
EigenResult principal_generalized_eig(const FaceForm& K, std::span<const double> mass, EigMode mode,
                                      double tol = 1e-12);

/// Convenience overload for a plain tridiagonal K (diagonal `diag`, off-diagonal `off`).
EigenResult principal_generalized_eig(std::span<const double> diag, std::span<const double> off,
                                      std::span<const double> mass, EigMode mode,
                                      double tol = 1e-12);

/// Number of eigenvalues of K below x.
std::size_t sturm_count(const FaceForm& K, double x);
std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double x);

}  // namespace sislab
