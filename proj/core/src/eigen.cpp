#include "sislab/eigen.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sislab/error.hpp"

namespace sislab {

namespace {

constexpr int kMaxIterations = 10000;
// extra steps allowed once the residual test passes, waiting for the quotient to settle
constexpr int kSettleSteps = 10;

const double kPivMin = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();

double sgn(double b) { return b > 0.0 ? 1.0 : -1.0; }

double gershgorin_norm(const FaceForm& K) {
    const std::size_t n = K.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::abs(K.extra[i] + K.alpha[i] + K.beta[i]);
        if (i > 0) r += std::abs(K.off[i - 1]);
        if (i + 1 < n) r += std::abs(K.off[i]);
        s = std::max(s, r);
    }
    return s;
}

// LDL^T pivots of K - x I, written through the excess X_i = d_i - alpha_i
void pivots(const FaceForm& K, double x, Field& d) {
    const std::size_t n = K.size();
    d.resize(n);
    double X = K.extra[0] - x;
    double p = K.alpha[0] + X;
    if (std::abs(p) < kPivMin) p = -kPivMin;
    d[0] = p;
    for (std::size_t i = 1; i < n; ++i) {
        X = K.extra[i] - x + K.beta[i] * ((d[i - 1] - K.alpha[i - 1]) / d[i - 1]);
        p = K.alpha[i] + X;
        if (std::abs(p) < kPivMin) p = -kPivMin;
        d[i] = p;
    }
}

Field face_apply(const FaceForm& K, std::span<const double> y) {
    const std::size_t n = K.size();
    Field g(n > 0 ? n - 1 : 0), out(n);
    for (std::size_t f = 0; f + 1 < n; ++f) {
        g[f] = std::sqrt(K.alpha[f]) * y[f] + sgn(K.off[f]) * std::sqrt(K.beta[f + 1]) * y[f + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        double v = K.extra[i] * y[i];
        if (i + 1 < n) v += std::sqrt(K.alpha[i]) * g[i];
        if (i > 0) v += sgn(K.off[i - 1]) * std::sqrt(K.beta[i]) * g[i - 1];
        out[i] = v;
    }
    return out;
}

double smallest_bracket(const FaceForm& K, double& lo, double& hi) {
    const std::size_t n = K.size();
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(K.off[i - 1]);
        if (i + 1 < n) r += std::abs(K.off[i]);
        const double a = K.extra[i] + K.alpha[i] + K.beta[i];
        lo = std::min(lo, a - r);
        hi = std::max(hi, a + r);
    }
    const double scale = std::max(std::abs(lo), std::abs(hi));
    lo -= 1e-14 * scale + std::numeric_limits<double>::min();
    hi += 1e-14 * scale + std::numeric_limits<double>::min();
    for (int k = 0; k < 4000; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(K, mid) >= 1) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// (K - sigma) x = rhs with K - sigma positive definite
Field solve_shifted(const FaceForm& K, double sigma, std::span<const double> rhs) {
    const std::size_t n = K.size();
    Field d;
    pivots(K, sigma, d);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(d[i] > 0.0)) throw SolverError("shifted eigen system lost definiteness");
    }
    Field x(rhs.begin(), rhs.end());
    for (std::size_t i = 1; i < n; ++i) x[i] -= (K.off[i - 1] / d[i - 1]) * x[i - 1];
    for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= (K.off[i] / d[i]) * x[i + 1];
    return x;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

FaceForm face_form(std::span<const double> diag, std::span<const double> off) {
    const std::size_t n = diag.size();
    if (off.size() + 1 != n) throw ConfigError("tridiagonal size mismatch");
    FaceForm K;
    K.alpha.assign(n, 0.0);
    K.beta.assign(n, 0.0);
    K.off.assign(off.begin(), off.end());
    K.extra.resize(n);
    for (std::size_t f = 0; f + 1 < n; ++f) {
        K.alpha[f] = std::abs(off[f]);
        K.beta[f + 1] = std::abs(off[f]);
    }
    for (std::size_t i = 0; i < n; ++i) K.extra[i] = diag[i] - K.alpha[i] - K.beta[i];
    return K;
}

double face_form_quotient(const FaceForm& K, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += K.extra[i] * y[i] * y[i];
    for (std::size_t f = 0; f + 1 < y.size(); ++f) {
        const double g =
            std::sqrt(K.alpha[f]) * y[f] + sgn(K.off[f]) * std::sqrt(K.beta[f + 1]) * y[f + 1];
        s += g * g;
    }
    return s;
}

std::size_t sturm_count(const FaceForm& K, double x) {
    Field d;
    pivots(K, x, d);
    std::size_t c = 0;
    for (double p : d) c += p < 0.0 ? 1 : 0;
    return c;
}

std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double x) {
    return sturm_count(face_form(diag, off), x);
}

EigenResult principal_generalized_eig(const FaceForm& Kin, std::span<const double> mass,
                                      EigMode mode, double tol) {
    const std::size_t n = Kin.size();
    if (n == 0) throw ConfigError("empty eigenproblem");
    if (Kin.off.size() + 1 != n || Kin.alpha.size() != n || Kin.beta.size() != n ||
        mass.size() != n) {
        throw ConfigError("eigenproblem size mismatch");
    }
    for (std::size_t f = 0; f + 1 < n; ++f) {
        if (!(Kin.alpha[f] >= 0.0) || !(Kin.beta[f + 1] >= 0.0)) {
            throw ConfigError("face form needs nonnegative face shares");
        }
    }
    Field rm(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(mass[i] > 0.0) || !std::isfinite(mass[i])) {
            throw ConfigError("mass matrix must be strictly positive");
        }
        rm[i] = 1.0 / std::sqrt(mass[i]);
    }
    // standard form M^{-1/2} K M^{-1/2}
    FaceForm T = Kin;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = rm[i] * rm[i];
        T.alpha[i] *= s;
        T.beta[i] *= s;
        T.extra[i] *= s;
        if (i + 1 < n) T.off[i] *= rm[i] * rm[i + 1];
    }

    const double tnorm = std::max(gershgorin_norm(T), std::numeric_limits<double>::min());
    double lo = 0.0, hi = 0.0;
    smallest_bracket(T, lo, hi);
    if (mode == EigMode::Largest && !(hi > 0.0)) {
        throw SolverError("quotient denominator is not positive definite");
    }
    const double width =
        std::max(hi - lo, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lo));
    const double sigma = lo - std::max(width, std::numeric_limits<double>::min());

    Field y(n, 1.0 / std::sqrt(static_cast<double>(n)));
    EigenResult res;
    double theta = 0.0;
    double prev = std::numeric_limits<double>::quiet_NaN();
    int settled = -1;
    for (int it = 1; it <= kMaxIterations; ++it) {
        y = solve_shifted(T, sigma, y);
        const double nrm = norm2(y);
        if (!(nrm > 0.0) || !std::isfinite(nrm)) throw SolverError("inverse iteration broke down");
        for (double& v : y) v /= nrm;
        theta = face_form_quotient(T, y);
        const Field ty = face_apply(T, y);
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) r += (ty[i] - theta * y[i]) * (ty[i] - theta * y[i]);
        res.residual = std::sqrt(r) / tnorm;
        res.iterations = it;
        if (res.residual <= tol) {
            if (settled < 0) settled = it;
            if (std::abs(theta - prev) <= 1e-14 * std::abs(theta) || it - settled >= kSettleSteps) {
                break;
            }
        }
        prev = theta;
        if (it == kMaxIterations) {
            throw SolverError("eigen iteration did not converge (residual " +
                              num(res.residual) + ")");
        }
    }

    const double s = std::accumulate(y.begin(), y.end(), 0.0);
    if (s < 0.0) {
        for (double& v : y) v = -v;
    }
    const double top = max_value(y);
    for (double v : y) {
        if (v < -1e-12 * top) throw SolverError("principal eigenvector is not positive");
    }
    res.vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.vector[i] = std::max(y[i], 0.0) * rm[i];

    if (mode == EigMode::Largest) {
        if (!(theta > 0.0)) throw SolverError("quotient denominator is not positive definite");
        res.value = 1.0 / theta;
    } else {
        res.value = theta;
    }
    return res;
}

EigenResult principal_generalized_eig(std::span<const double> diag, std::span<const double> off,
                                      std::span<const double> mass, EigMode mode, double tol) {
    if (diag.empty()) throw ConfigError("empty eigenproblem");
    return principal_generalized_eig(face_form(diag, off), mass, mode, tol);
}

}  // namespace sislab
