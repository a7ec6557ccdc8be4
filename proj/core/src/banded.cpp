#include "sislab/banded.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "sislab/error.hpp"

extern "C" {
void dgbtrf_(const int* m, const int* n, const int* kl, const int* ku, double* ab,
             const int* ldab, int* ipiv, int* info);
void dgbtrs_(const char* trans, const int* n, const int* kl, const int* ku, const int* nrhs,
             const double* ab, const int* ldab, const int* ipiv, double* b, const int* ldb,
             int* info, std::size_t trans_len);
}

namespace sislab {

namespace {
constexpr double kPivotFloor = 1e-300;
}

BandedMatrix::BandedMatrix(std::size_t n, int bandwidth)
    : n_(n), bw_(bandwidth), bands_(static_cast<std::size_t>(2 * bandwidth + 1) * n, 0.0) {
    if (bandwidth < 0) throw ConfigError("negative bandwidth");
}

bool BandedMatrix::in_band(std::size_t i, std::size_t j) const {
    const long k = static_cast<long>(j) - static_cast<long>(i);
    return i < n_ && j < n_ && std::labs(k) <= bw_;
}

double& BandedMatrix::at(std::size_t i, std::size_t j) {
    if (!in_band(i, j)) throw ConfigError("banded index out of band");
    const long k = static_cast<long>(j) - static_cast<long>(i) + bw_;
    return bands_[static_cast<std::size_t>(k) * n_ + i];
}

double BandedMatrix::at(std::size_t i, std::size_t j) const {
    if (!in_band(i, j)) return 0.0;
    const long k = static_cast<long>(j) - static_cast<long>(i) + bw_;
    return bands_[static_cast<std::size_t>(k) * n_ + i];
}

Field BandedMatrix::multiply(std::span<const double> x) const {
    Field y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t j0 = i >= static_cast<std::size_t>(bw_) ? i - bw_ : 0;
        const std::size_t j1 = std::min(n_ - 1, i + bw_);
        double s = 0.0;
        for (std::size_t j = j0; j <= j1; ++j) s += at(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

BandedLU::BandedLU(const BandedMatrix& m)
    : n_(m.size()), kl_(m.bandwidth()), ldab_(3 * m.bandwidth() + 1) {
    const int n = static_cast<int>(n_);
    const int ku = kl_;
    ab_.assign(static_cast<std::size_t>(ldab_) * n_, 0.0);
    ipiv_.assign(n_, 0);
    // LAPACK layout: A(i,j) at ab[(kl + ku + i - j) + j*ldab], column-major
    for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t i0 = j >= static_cast<std::size_t>(ku) ? j - ku : 0;
        const std::size_t i1 = std::min(n_ - 1, j + kl_);
        for (std::size_t i = i0; i <= i1; ++i) {
            ab_[static_cast<std::size_t>(kl_ + ku) + i - j + j * ldab_] = m.at(i, j);
        }
    }
    int info = 0;
    dgbtrf_(&n, &n, &kl_, &ku, ab_.data(), &ldab_, ipiv_.data(), &info);
    if (info < 0) throw SolverError("dgbtrf: invalid argument " + std::to_string(-info));
    for (std::size_t j = 0; j < n_; ++j) {
        const double u = ab_[static_cast<std::size_t>(kl_ + ku) + j * ldab_];
        if (!(std::abs(u) >= kPivotFloor)) {
            throw SolverError("banded matrix is singular (pivot " + std::to_string(j) + ")");
        }
    }
}

Field BandedLU::solve(std::span<const double> rhs) const {
    if (rhs.size() != n_) throw ConfigError("banded solve: rhs length mismatch");
    Field x(rhs.begin(), rhs.end());
    const int n = static_cast<int>(n_);
    const int nrhs = 1;
    int info = 0;
    dgbtrs_("N", &n, &kl_, &kl_, &nrhs, ab_.data(), &ldab_, ipiv_.data(), x.data(), &n, &info, 1);
    if (info != 0) throw SolverError("dgbtrs failed");
    return x;
}

Field solve_banded(const BandedMatrix& m, std::span<const double> rhs) {
    return BandedLU(m).solve(rhs);
}

Field solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                        std::span<const double> upper, std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (rhs.size() != n || lower.size() != n || upper.size() != n) {
        throw ConfigError("tridiagonal solve: length mismatch");
    }
    Field c(n), x(n);
    double piv = diag[0];
    if (!(std::abs(piv) >= kPivotFloor)) throw SolverError("tridiagonal system is singular");
    c[0] = n > 1 ? upper[0] / piv : 0.0;
    x[0] = rhs[0] / piv;
    for (std::size_t i = 1; i < n; ++i) {
        piv = diag[i] - lower[i] * c[i - 1];
        if (!(std::abs(piv) >= kPivotFloor)) throw SolverError("tridiagonal system is singular");
        c[i] = i + 1 < n ? upper[i] / piv : 0.0;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / piv;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
    return x;
}

}  // namespace sislab
