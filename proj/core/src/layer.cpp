#include "sislab/layer.hpp"

#include <algorithm>
#include <cmath>

#include "sislab/error.hpp"

namespace sislab {

LogInterpolant::LogInterpolant(const Mesh& mesh, std::span<const double> u)
    : x_(mesh.centers), v_(u.size()), slope_(u.size()) {
    const std::size_t n = u.size();
    if (n != mesh.size() || n < 2) throw ConfigError("interpolant needs one value per cell");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(u[i] > 0.0)) throw ConfigError("log interpolation needs positive values");
        v_[i] = std::log(u[i]);
    }
    Field secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i]);
    slope_[0] = secant[0];
    slope_[n - 1] = secant[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double l = secant[i - 1], r = secant[i];
        if (l * r <= 0.0) {
            slope_[i] = 0.0;
        } else {
            // weighted harmonic mean keeps each cubic piece monotone
            const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
            const double w1 = 2.0 * hr + hl, w2 = hr + 2.0 * hl;
            slope_[i] = (w1 + w2) / (w1 / l + w2 / r);
        }
    }
}

double LogInterpolant::operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_[0]) return std::exp(v_[0] + slope_[0] * (x - x_[0]));
    if (x >= x_[n - 1]) return std::exp(v_[n - 1] + slope_[n - 1] * (x - x_[n - 1]));
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double v = (2 * t3 - 3 * t2 + 1) * v_[i] + (t3 - 2 * t2 + t) * h * slope_[i] +
                     (-2 * t3 + 3 * t2) * v_[i + 1] + (t3 - t2) * h * slope_[i + 1];
    return std::exp(v);
}

LayerProfile rescale_boundary_layer(std::span<const double> S, std::span<const double> I,
                                    const Mesh& mesh, double q, double y_max, int points) {
    if (!(q > 0.0)) throw ConfigError("boundary-layer rescaling needs q > 0");
    if (!(y_max > 0.0) || y_max > q * mesh.L) throw ConfigError("y_max must lie in (0, qL]");
    if (points < 2) throw ConfigError("boundary-layer grid needs at least 2 points");
    const LogInterpolant fs(mesh, S), fi(mesh, I);
    LayerProfile p;
    p.y.resize(points);
    p.x.resize(points);
    p.a.resize(points);
    p.b.resize(points);
    for (int k = 0; k < points; ++k) {
        const double y = k + 1 == points ? y_max : y_max * k / (points - 1);
        const double x = mesh.L - y / q;
        p.y[k] = y;
        p.x[k] = x;
        p.a[k] = fs(x) / q;
        p.b[k] = fi(x) / q;
    }
    return p;
}

double relative_sup_error(std::span<const double> u, std::span<const double> target, double scale) {
    return sup_distance(u, target) / scale;
}

double integrate_window(const Mesh& mesh, std::span<const double> u, double a, double b) {
    double s = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double lo = std::max(a, mesh.faces[i]), hi = std::min(b, mesh.faces[i + 1]);
        if (hi > lo) s += u[i] * (hi - lo);
    }
    return s;
}

}  // namespace sislab
