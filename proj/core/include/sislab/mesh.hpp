#pragma once

#include <cstddef>
#include <span>

#include "sislab/field.hpp"

namespace sislab {

struct Grading {
    enum class Type { Uniform, Geometric };
    Type type = Type::Uniform;
    double ratio = 1.0;  // h_{i+1} / h_i for Geometric

    static Grading uniform() { return {}; }
    static Grading geometric(double r) { return {Type::Geometric, r}; }
};

/// Cell-centred 1D grid on [0, L].
struct Mesh {
    double L = 1.0;
    Field centers;
    Field faces;   // size N+1, faces[0] = 0, faces[N] = L
    Field widths;
    Grading grading;

    std::size_t size() const { return centers.size(); }
};

/// Geometric grading with ratio < 1 puts the smallest cells at x = L.
/// Throws ConfigError for L <= 0, N < 8, or ratio outside (0.8, 1.25).
Mesh build_mesh(double L, int N, Grading grading = Grading::uniform());

/// Midpoint rule: sum u_i w_i h_i (w omitted when empty).
double integrate(const Mesh& mesh, std::span<const double> u, std::span<const double> weight = {});

/// Row-wise tridiagonal matrix. lower[0] and upper[N-1] are unused.
struct TridiagonalOperator {
    Field lower;
    Field diag;
    Field upper;
    double d = 0.0;
    double q = 0.0;
    bool has_potential = false;

    std::size_t size() const { return diag.size(); }
    Field apply(std::span<const double> u) const;
};

/// Scharfetter-Gummel finite-volume discretisation of -d u'' + q u' + c u with
/// zero total flux (d u' - q u = 0) at both ends. An empty potential means c = 0.
TridiagonalOperator assemble_operator(const Mesh& mesh, double d, double q,
                                      std::span<const double> potential = {});

/// rhs - (A + diag(potential)) u for the operator assemble_operator(mesh, d, q)
/// would build, evaluated face by face in extended precision. Because the face
/// fluxes are never summed into matrix entries first, the weighted sum
/// sum_i h_i r_i telescopes to rounding level; iterative refinement against this
/// residual makes discrete mass identities hold to machine precision.
Field flux_form_residual(const Mesh& mesh, double d, double q, std::span<const double> potential,
                         std::span<const double> u, std::span<const double> rhs);

/// Bernoulli function z / (e^z - 1), with B(0) = 1.
double bernoulli(double z);

/// Symmetric tridiagonal form D A D^{-1} of an SG operator.
/// off[i] couples rows i and i+1 (size N-1). log_scale holds log D_i, so the
/// physical vector is u_i = exp(-log_scale_i) * z_i.
/// alpha[i] and beta[i+1] are the parts of diag[i] and diag[i+1] contributed
/// by face i+1/2 (alpha[i] beta[i+1] = off[i]^2).
struct SymmetricTridiagonal {
    Field diag;
    Field off;
    Field log_scale;
    Field alpha;
    Field beta;

    std::size_t size() const { return diag.size(); }
    Field apply(std::span<const double> z) const;
};

/// Builds the symmetric form directly from the face coefficients, so that no
/// exponential weight is ever formed (safe for any Peclet number).
SymmetricTridiagonal symmetrize(const Mesh& mesh, const TridiagonalOperator& op);

/// Maps a vector of the symmetric form back to the original operator's
/// coordinates, rescaled to unit maximum.
Field to_physical(const SymmetricTridiagonal& sym, std::span<const double> z);

/// Inverse of to_physical, rescaled to unit maximum.
Field to_symmetric(const SymmetricTridiagonal& sym, std::span<const double> u);

}  // namespace sislab
