#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sislab/field.hpp"

namespace sislab {

/// Square band matrix with equal lower and upper bandwidth, stored by
/// diagonal: band(k) for k in [-bandwidth, bandwidth] holds entries (i, i+k).
class BandedMatrix {
public:
    BandedMatrix(std::size_t n, int bandwidth);

    std::size_t size() const { return n_; }
    int bandwidth() const { return bw_; }
    std::size_t band_count() const { return static_cast<std::size_t>(2 * bw_ + 1); }

    /// Entry (i, j); |i - j| must not exceed the bandwidth.
    double& at(std::size_t i, std::size_t j);
    double at(std::size_t i, std::size_t j) const;
    bool in_band(std::size_t i, std::size_t j) const;

    Field multiply(std::span<const double> x) const;

private:
    std::size_t n_;
    int bw_;
    std::vector<double> bands_;  // band_count() rows of length n, indexed by row i
};

/// LU factorisation with partial pivoting inside the band (LAPACK dgbtrf).
class BandedLU {
public:
    /// Throws SolverError if a pivot magnitude falls below 1e-300.
    explicit BandedLU(const BandedMatrix& m);

    Field solve(std::span<const double> rhs) const;
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    int kl_;
    int ldab_;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
};

Field solve_banded(const BandedMatrix& m, std::span<const double> rhs);

/// Thomas algorithm, no pivoting. lower[0] and upper[n-1] are ignored.
Field solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                        std::span<const double> upper, std::span<const double> rhs);

}  // namespace sislab
