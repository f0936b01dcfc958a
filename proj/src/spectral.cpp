#include "udiff/spectral.hpp"

#include "udiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace udiff {
namespace {

constexpr double kTiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();

// Pivots of B = mu·M − K (tridiagonal, off-diagonal −K.off).
std::size_t negative_pivots(const DiscreteOperator& op, double mu)
{
    const Eigen::Index n = op.size();
    std::size_t count = 0;
    double d = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double b = mu * op.M[i] - op.K.diag[i];
        d = i == 0 ? b : b - op.K.off[i - 1] * op.K.off[i - 1] / d;
        if (d == 0.0)
            d = -kTiny;
        if (d < 0.0)
            ++count;
    }
    return count;
}

struct Bounds {
    double lo;
    double hi;
};

// Gershgorin interval of M^{-1/2} K M^{-1/2}.
Bounds gershgorin(const DiscreteOperator& op)
{
    const Eigen::Index n = op.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0)
            radius += std::abs(op.K.off[i - 1]) / std::sqrt(op.M[i - 1] * op.M[i]);
        if (i + 1 < n)
            radius += std::abs(op.K.off[i]) / std::sqrt(op.M[i] * op.M[i + 1]);
        const double centre = op.K.diag[i] / op.M[i];
        lo = std::min(lo, centre - radius);
        hi = std::max(hi, centre + radius);
    }
    const double pad = 1e-12 * std::max(std::abs(lo), std::abs(hi)) + kTiny;
    return {lo - pad, hi + pad};
}

// Bisect for the eigenvalue with exactly `index` eigenvalues above it.
double bisect_eigenvalue(const DiscreteOperator& op, std::size_t index, double lo, double hi)
{
    // invariant: count_above(lo) ≥ index+1, count_above(hi) ≤ index
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
            break;
        if (negative_pivots(op, mid) > index)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Twisted factorization of λM − K: the vector with z_r = 1 at the twist index.
Vector twisted_vector(const DiscreteOperator& op, double lambda)
{
    const Eigen::Index n = op.size();
    Vector b(n);
    for (Eigen::Index i = 0; i < n; ++i)
        b[i] = lambda * op.M[i] - op.K.diag[i];
    const Vector& e = op.K.off; // B off-diagonal is −e; signs cancel in e²

    Vector dplus(n), dminus(n);
    dplus[0] = b[0];
    for (Eigen::Index i = 1; i < n; ++i) {
        if (dplus[i - 1] == 0.0)
            dplus[i - 1] = kTiny;
        dplus[i] = b[i] - e[i - 1] * e[i - 1] / dplus[i - 1];
    }
    dminus[n - 1] = b[n - 1];
    for (Eigen::Index i = n - 1; i-- > 0;) {
        if (dminus[i + 1] == 0.0)
            dminus[i + 1] = kTiny;
        dminus[i] = b[i] - e[i] * e[i] / dminus[i + 1];
    }
    // The M⁻¹-weighted residual of the M-normalized vector is at most |γ_r|/M_r,
    // so the twist minimizes that ratio rather than |γ_r| alone.
    Eigen::Index twist = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double gamma = std::abs(dplus[i] + dminus[i] - b[i]) / op.M[i];
        if (gamma < best) {
            best = gamma;
            twist = i;
        }
    }
    Vector z(n);
    z[twist] = 1.0;
    // Rows of B z = γ e_r: upward uses top-down pivots, downward bottom-up.
    for (Eigen::Index i = twist; i-- > 0;)
        z[i] = e[i] * z[i + 1] / dplus[i];
    for (Eigen::Index i = twist; i + 1 < n; ++i)
        z[i + 1] = e[i] * z[i] / dminus[i + 1];
    return z;
}

double m_norm(const DiscreteOperator& op, const Vector& v)
{
    return std::sqrt(v.cwiseProduct(op.M).dot(v));
}

double residual(const DiscreteOperator& op, const Vector& v, double lambda)
{
    const Vector r = op.K.multiply(v) - lambda * op.M.cwiseProduct(v);
    return std::sqrt(r.cwiseQuotient(op.M).dot(r));
}

// Normalize so the M-weighted mean is positive.
void orient(const DiscreteOperator& op, Vector& v)
{
    if (op.M.dot(v) < 0.0)
        v = -v;
}

Vector positive_ground_vector(const DiscreteOperator& op, double lambda0, double lambda1)
{
    const Eigen::Index n = op.size();
    const double gap = std::isfinite(lambda1) ? lambda0 - lambda1 : std::max(1.0, std::abs(lambda0));
    double shift = 1e-3 * gap;
    for (int attempt = 0; attempt < 40; ++attempt, shift *= 4.0) {
        const double sigma = lambda0 + shift;
        Vector diag(n);
        for (Eigen::Index i = 0; i < n; ++i)
            diag[i] = sigma * op.M[i] - op.K.diag[i];
        const Vector off = -op.K.off;
        MMatrixFactor factor;
        try {
            factor = MMatrixFactor(diag, off);
        } catch (const NumericError&) {
            continue; // rounding put σ below λ₀; move further up
        }
        Vector v = Vector::Ones(n);
        v /= m_norm(op, v);
        for (int it = 0; it < 60; ++it) {
            Vector w = factor.solve(op.M.cwiseProduct(v));
            w /= m_norm(op, w);
            const double change = m_norm(op, w - v);
            v = std::move(w);
            if (change < 1e-15)
                break;
        }
        return v;
    }
    throw NumericError("ground state: shifted M-matrix never factorized");
}

} // namespace

std::size_t count_above(const DiscreteOperator& op, double mu)
{
    return negative_pivots(op, mu);
}

std::vector<double> top_eigenvalues(const DiscreteOperator& op, int k)
{
    const Eigen::Index n = op.size();
    if (k < 1 || k > n)
        throw ParameterError("solve_spectrum: k must lie in [1, grid size]");
    const Bounds bounds = gershgorin(op);
    std::vector<double> values;
    double upper = bounds.hi;
    for (int j = 0; j < k; ++j) {
        const double lambda = bisect_eigenvalue(op, static_cast<std::size_t>(j), bounds.lo, upper);
        values.push_back(lambda);
        upper = std::max(std::nextafter(lambda, bounds.lo), bounds.lo);
    }
    for (std::size_t j = 1; j < values.size(); ++j)
        if (!(values[j] < values[j - 1]))
            throw NumericError("solve_spectrum: eigenvalues not separated at working precision (index " +
                               std::to_string(j) + ")");
    return values;
}

SpectrumResult solve_spectrum(const DiscreteOperator& op, int k)
{
    SpectrumResult result;
    result.ell = op.ell;
    result.grid_ref = op.grid.describe();
    result.eigenvalues = top_eigenvalues(op, k);

    for (int j = 0; j < k; ++j) {
        const double lambda = result.eigenvalues[static_cast<std::size_t>(j)];
        Vector v;
        if (j == 0 && op.ell == 0) {
            const double next = k > 1 ? result.eigenvalues[1] : std::numeric_limits<double>::quiet_NaN();
            v = positive_ground_vector(op, lambda, next);
        } else {
            v = twisted_vector(op, lambda);
            v /= m_norm(op, v);
            orient(op, v);
        }
        result.residuals.push_back(residual(op, v, lambda));
        result.eigenvectors.push_back(std::move(v));
    }

    double defect = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j <= i; ++j) {
            const double inner = result.eigenvectors[i].cwiseProduct(op.M).dot(result.eigenvectors[j]);
            defect = std::max(defect, std::abs(inner - (i == j ? 1.0 : 0.0)));
        }
    result.orthogonality_defect = defect;

    for (int j = 0; j < k; ++j) {
        const double lambda = result.eigenvalues[static_cast<std::size_t>(j)];
        if (!(result.residuals[j] <= 1e-8 * (std::abs(lambda) + 1.0)))
            throw NumericError("solve_spectrum: residual " + std::to_string(result.residuals[j]) + " at index " +
                               std::to_string(j) + " exceeds tolerance");
    }
    if (!(defect <= 1e-8))
        throw NumericError("solve_spectrum: M-orthonormality defect " + std::to_string(defect));
    return result;
}

GroundState ground_state(const DiscreteOperator& op)
{
    if (op.ell != 0)
        throw ParameterError("ground_state: requires the ell = 0 channel");
    const Eigen::Index n = op.size();
    const Bounds bounds = gershgorin(op);
    GroundState gs;
    gs.lambda0 = bisect_eigenvalue(op, 0, bounds.lo, bounds.hi);
    double lambda1 = std::numeric_limits<double>::quiet_NaN();
    if (n > 1) {
        lambda1 = bisect_eigenvalue(op, 1, bounds.lo, gs.lambda0);
        gs.simplicity_gap = gs.lambda0 - lambda1;
        if (!(gs.simplicity_gap >= 1e-10 * std::abs(gs.lambda0)))
            throw DegeneracyError("ground_state: numerically degenerate top eigenvalue");
    } else {
        gs.simplicity_gap = std::numeric_limits<double>::infinity();
    }
    gs.psi = positive_ground_vector(op, gs.lambda0, lambda1);
    if (!(gs.psi.minCoeff() > 0.0))
        throw NumericError("ground_state: eigenvector is not strictly positive");
    return gs;
}

int sign_changes(const Vector& v)
{
    int changes = 0;
    int last = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const int s = v[i] > 0.0 ? 1 : (v[i] < 0.0 ? -1 : 0);
        if (s == 0)
            continue;
        if (last != 0 && s != last)
            ++changes;
        last = s;
    }
    return changes;
}

AccumulationReport accumulation_check(const SpectrumResult& spectrum)
{
    AccumulationReport report;
    const auto& ev = spectrum.eigenvalues;
    report.note = "discrete surrogate: growth of the first gaps, not a proof of accumulation at -infinity";
    if (ev.size() < 2) {
        report.holds = false;
        report.note = "fewer than two eigenvalues: no gaps";
        return report;
    }
    report.min_gap = std::numeric_limits<double>::infinity();
    report.gaps_nondecreasing = true;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
        const double gap = ev[i] - ev[i + 1];
        report.gaps.push_back(gap);
        report.strictly_decreasing = report.strictly_decreasing && gap > 0.0;
        report.min_gap = std::min(report.min_gap, gap);
        if (i > 0 && gap < report.gaps[i - 1] * (1.0 - 1e-9))
            report.gaps_nondecreasing = false;
    }
    // Gaps are bounded away from zero when the smallest one is a fixed fraction
    // of the first; for accumulating spectra they do not shrink.
    report.holds = report.strictly_decreasing && report.min_gap >= 0.5 * report.gaps.front() && report.min_gap > 0.0;
    return report;
}

} // namespace udiff
