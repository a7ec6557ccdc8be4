#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace sislab {

/// Cell-centred nodal values on a Mesh.
using Field = std::vector<double>;

inline double sup_norm(std::span<const double> u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

inline double sup_distance(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double min_value(std::span<const double> u) {
    return *std::min_element(u.begin(), u.end());
}

inline double max_value(std::span<const double> u) {
    return *std::max_element(u.begin(), u.end());
}

inline bool all_positive(std::span<const double> u) {
    return std::all_of(u.begin(), u.end(), [](double v) { return v > 0.0 && std::isfinite(v); });
}

}  // namespace sislab
