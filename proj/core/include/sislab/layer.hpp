#pragma once

#include <span>

#include "sislab/field.hpp"
#include "sislab/mesh.hpp"

namespace sislab {

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolation of log u through
/// the cell centres, extended linearly in log u past the first and last
/// centre. Exact for exponentials; `u` must be positive.
class LogInterpolant {
public:
    LogInterpolant(const Mesh& mesh, std::span<const double> u);
    double operator()(double x) const;

private:
    Field x_, v_, slope_;
};

struct LayerProfile {
    Field y;
    Field x;  // L - y/q
    Field a;  // S(L - y/q) / q
    Field b;  // I(L - y/q) / q
};

/// Boundary-layer variables on a uniform grid of `points` values of y in
/// [0, y_max]. Throws ConfigError when q <= 0, y_max <= 0 or y_max > qL.
LayerProfile rescale_boundary_layer(std::span<const double> S, std::span<const double> I,
                                    const Mesh& mesh, double q, double y_max, int points = 301);

/// Sup over samples of |u - target| / scale.
double relative_sup_error(std::span<const double> u, std::span<const double> target, double scale);

/// Integral of a cell-wise constant field over [a, b], counting partial cells.
double integrate_window(const Mesh& mesh, std::span<const double> u, double a, double b);

}  // namespace sislab
