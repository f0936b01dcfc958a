#include "udiff/tridiagonal.hpp"

namespace udiff {

Vector SymTridiagonal::multiply(const Vector& x) const
{
    if (x.size() != diag.size())
        throw DimensionError("tridiagonal product: size mismatch");
    Vector y = diag.cwiseProduct(x);
    const Eigen::Index n = diag.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        y[i] += off[i] * x[i + 1];
        y[i + 1] += off[i] * x[i];
    }
    return y;
}

MMatrixFactor::MMatrixFactor(const Vector& diag, const Vector& off) : pivot_(diag.size()), off_(off)
{
    const Eigen::Index n = diag.size();
    if (n == 0)
        return;
    pivot_[0] = diag[0];
    for (Eigen::Index i = 1; i < n; ++i) {
        if (!(pivot_[i - 1] > 0.0))
            throw NumericError("M-matrix factorization met a non-positive pivot");
        pivot_[i] = diag[i] - off[i - 1] * off[i - 1] / pivot_[i - 1];
    }
    if (!(pivot_[n - 1] > 0.0))
        throw NumericError("M-matrix factorization met a non-positive pivot");
}

Vector MMatrixFactor::solve(const Vector& rhs) const
{
    const Eigen::Index n = pivot_.size();
    if (rhs.size() != n)
        throw DimensionError("M-matrix solve: size mismatch");
    Vector y = rhs;
    for (Eigen::Index i = 1; i < n; ++i)
        y[i] -= off_[i - 1] / pivot_[i - 1] * y[i - 1];
    Vector x(n);
    if (n == 0)
        return x;
    x[n - 1] = y[n - 1] / pivot_[n - 1];
    for (Eigen::Index i = n - 1; i-- > 0;)
        x[i] = (y[i] - off_[i] * x[i + 1]) / pivot_[i];
    return x;
}

Vector solve_m_matrix(const Vector& diag, const Vector& off, const Vector& rhs)
{
    return MMatrixFactor(diag, off).solve(rhs);
}

} // namespace udiff
