/**
 * @file tridiagonal.hpp
 * @brief Symmetric tridiagonal storage and the banded solves used throughout.
 */
#pragma once

#include "udiff/error.hpp"

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <vector>

namespace udiff {

using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Symmetric tridiagonal matrix: diag (n) and off (n−1) entries.
struct SymTridiagonal {
    Vector diag;
    Vector off;

    Eigen::Index size() const { return diag.size(); }
    Vector multiply(const Vector& x) const;
};

/**
 * Thomas algorithm for a symmetric tridiagonal system without pivoting.
 * Intended for M-matrices (positive pivots, nonpositive off-diagonal), where
 * every step is free of cancellation and nonnegative data give nonnegative
 * solutions. Throws NumericError on a non-positive pivot.
 */
Vector solve_m_matrix(const Vector& diag, const Vector& off, const Vector& rhs);

/// Precomputed pivots of solve_m_matrix, reused across many right-hand sides.
class MMatrixFactor {
public:
    MMatrixFactor() = default;
    MMatrixFactor(const Vector& diag, const Vector& off);
    Vector solve(const Vector& rhs) const;
    Eigen::Index size() const { return pivot_.size(); }

private:
    Vector pivot_;
    Vector off_;
};

/**
 * Gaussian elimination with partial pivoting for a general tridiagonal system
 * (sub-, main and super-diagonal). Returns false if a zero pivot is met.
 */
template <class T>
bool solve_tridiagonal_pivoted(std::vector<T> sub, std::vector<T> diag, std::vector<T> super, std::vector<T>& rhs)
{
    const std::size_t n = diag.size();
    if (n == 0)
        return true;
    std::vector<T> super2(n, T(0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(diag[i]) >= std::abs(sub[i])) {
            if (diag[i] == T(0))
                return false;
            const T factor = sub[i] / diag[i];
            diag[i + 1] -= factor * super[i];
            rhs[i + 1] -= factor * rhs[i];
            if (i + 2 < n)
                super2[i] = T(0);
        } else {
            // swap rows i and i+1
            const T factor = diag[i] / sub[i];
            diag[i] = sub[i];
            const T tmp_diag = diag[i + 1];
            diag[i + 1] = super[i] - factor * tmp_diag;
            super[i] = tmp_diag;
            if (i + 2 < n) {
                super2[i] = super[i + 1];
                super[i + 1] = -factor * super2[i];
            }
            std::swap(rhs[i], rhs[i + 1]);
            rhs[i + 1] -= factor * rhs[i];
        }
    }
    if (diag[n - 1] == T(0))
        return false;
    rhs[n - 1] /= diag[n - 1];
    if (n > 1)
        rhs[n - 2] = (rhs[n - 2] - super[n - 2] * rhs[n - 1]) / diag[n - 2];
    for (std::size_t k = n - 2; k-- > 0;)
        rhs[k] = (rhs[k] - super[k] * rhs[k + 1] - super2[k] * rhs[k + 2]) / diag[k];
    return true;
}

} // namespace udiff
