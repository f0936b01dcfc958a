#include "udiff/radial.hpp"

#include "udiff/error.hpp"
#include "udiff/numerics.hpp"

#include <cmath>
#include <cstdio>

namespace udiff {
namespace {

// ∫_lo^hi t^{k} dt for integer k ≥ 0, written to avoid cancellation when lo ≈ hi.
double power_integral(int k, double lo, double hi)
{
    if (hi <= lo)
        return 0.0;
    const double e = k + 1.0;
    if (lo <= 0.0)
        return std::pow(hi, e) / e;
    return std::pow(hi, e) * -std::expm1(e * std::log(lo / hi)) / e;
}

// 1 / ∫_lo^hi t^{1−N} dt.
double harmonic_flux(int N, double lo, double hi)
{
    const double k = N - 2.0;
    // ∫ t^{1−N} = (lo^{2−N} − hi^{2−N})/(N−2) = lo^{2−N}(1 − (lo/hi)^{N−2})/(N−2)
    const double integral = std::pow(lo, -k) * -std::expm1(k * std::log(lo / hi)) / k;
    return 1.0 / integral;
}

} // namespace

double RadialGrid::max_cell_width() const
{
    double widest = 0.0;
    double prev = 0.0;
    for (double r : nodes) {
        widest = std::max(widest, r - prev);
        prev = r;
    }
    return std::max(widest, R - prev);
}

std::string RadialGrid::describe() const
{
    char buf[128];
    std::snprintf(buf, sizeof buf, "N=%d R=%.6g n=%zu grading=%.6g", dimension, R, nodes.size(), grading);
    return buf;
}

double RadialGrid::lower_face(std::size_t i, InnerBoundary inner) const
{
    if (i == 0)
        return inner == InnerBoundary::ZeroFlux ? 0.0 : 0.5 * nodes[0];
    return 0.5 * (nodes[i - 1] + nodes[i]);
}

double RadialGrid::upper_face(std::size_t i, OuterBoundary outer) const
{
    if (i + 1 < nodes.size())
        return 0.5 * (nodes[i] + nodes[i + 1]);
    return outer == OuterBoundary::Dirichlet ? 0.5 * (nodes[i] + R) : R;
}

Vector RadialGrid::lebesgue_weights(InnerBoundary inner, OuterBoundary outer) const
{
    const double sigma = udiff::sphere_area(dimension);
    Vector w(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i)
        w[static_cast<Eigen::Index>(i)] =
            sigma * power_integral(dimension - 1, lower_face(i, inner), upper_face(i, outer));
    return w;
}

RadialGrid build_grid(int dimension, double R, int n, double grading)
{
    if (dimension < 3)
        throw ParameterError("grid: dimension must be at least 3");
    if (!(R > 0.0) || !std::isfinite(R))
        throw ParameterError("grid: R must be positive and finite");
    if (n < 1)
        throw ParameterError("grid: need at least one interior node");
    if (!(grading >= 1.0) || !std::isfinite(grading))
        throw ParameterError("grid: grading must be at least 1");

    RadialGrid grid;
    grid.dimension = dimension;
    grid.R = R;
    grid.grading = grading;
    grid.nodes.resize(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        grid.nodes[static_cast<std::size_t>(i - 1)] = R * std::pow(static_cast<double>(i) / (n + 1), grading);
    grid.cell_volumes.resize(static_cast<std::size_t>(n) + 1);
    double prev = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double next = i < n ? grid.nodes[static_cast<std::size_t>(i)] : R;
        grid.cell_volumes[static_cast<std::size_t>(i)] = power_integral(dimension - 1, prev, next);
        prev = next;
    }
    return grid;
}

DiscreteOperator assemble_operator(const RadialGrid& grid, const RadialModel& model, int ell, bool include_potential,
                                   AssemblyOptions options)
{
    if (grid.nodes.empty())
        throw ParameterError("assembly: empty grid");
    if (grid.dimension != model.dimension)
        throw DimensionError("assembly: grid and model dimensions differ");
    if (ell < 0)
        throw ParameterError("assembly: channel index must be nonnegative");

    const int N = grid.dimension;
    const auto n = static_cast<Eigen::Index>(grid.size());
    DiscreteOperator op;
    op.grid = grid;
    op.model = model;
    op.ell = ell;
    op.include_potential = include_potential;
    op.inner = ell == 0 ? InnerBoundary::ZeroFlux : InnerBoundary::Dirichlet;
    op.outer = options.outer;
    op.K.diag = Vector::Zero(n);
    op.K.off = Vector::Zero(std::max<Eigen::Index>(n - 1, 0));
    op.M = Vector::Zero(n);

    const bool unit_diffusion = !model.diffusion_exponent.has_value();
    const bool with_potential = include_potential && model.potential_scale != 0.0;
    const double centrifugal = ell * (ell + N - 2.0);

    for (Eigen::Index i = 0; i < n; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const double lo = grid.lower_face(iu, op.inner);
        const double hi = grid.upper_face(iu, op.outer);

        if (unit_diffusion)
            op.M[i] = power_integral(N - 1, lo, hi);
        else
            op.M[i] = numerics::integrate([&](double t) { return std::pow(t, N - 1) / model.a(t); }, lo, hi, 1e-12);

        double potential = 0.0;
        if (with_potential)
            potential = numerics::integrate([&](double t) { return std::pow(t, N - 1) * model.vtilde(t); }, lo, hi,
                                            1e-12);
        if (centrifugal > 0.0)
            potential += centrifugal * power_integral(N - 3, lo, hi);
        op.K.diag[i] -= potential;
    }

    // Fluxes between neighbouring nodes.
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double c = harmonic_flux(N, grid.nodes[static_cast<std::size_t>(i)],
                                       grid.nodes[static_cast<std::size_t>(i + 1)]);
        op.K.diag[i] -= c;
        op.K.diag[i + 1] -= c;
        op.K.off[i] = c;
    }
    if (op.outer == OuterBoundary::Dirichlet)
        op.K.diag[n - 1] -= harmonic_flux(N, grid.nodes.back(), grid.R);
    if (op.inner == InnerBoundary::Dirichlet) {
        // flux through the face r₁/2 towards u(0) = 0, by a centred difference
        const double r1 = grid.nodes.front();
        op.K.diag[0] -= std::pow(0.5 * r1, N - 1) / r1;
    }
    return op;
}

DiscreteOperator assemble_operator(const RadialGrid& grid, const OperatorParams& params, int ell,
                                   bool include_potential)
{
    return assemble_operator(grid, RadialModel::of(params), ell, include_potential);
}

Vector apply_operator(const DiscreteOperator& op, const Vector& u)
{
    if (u.size() != op.size())
        throw DimensionError("apply_operator: vector length differs from the grid");
    return op.K.multiply(u).cwiseQuotient(op.M);
}

} // namespace udiff
