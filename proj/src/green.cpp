#include "udiff/green.hpp"

#include "udiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace udiff {
namespace {

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

double nearest_eigenvalue(const DiscreteOperator& op, double lambda)
{
    const auto above = count_above(op, lambda);
    const auto n = static_cast<std::size_t>(op.size());
    const auto values = top_eigenvalues(op, static_cast<int>(std::min(above + 1, n)));
    double best = std::numeric_limits<double>::quiet_NaN();
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = above > 0 ? above - 1 : 0; j < values.size(); ++j) {
        const double d = std::abs(values[j] - lambda);
        if (d < dist) {
            dist = d;
            best = values[j];
        }
    }
    return best;
}

void guard_proximity(const DiscreteOperator& op, double lambda)
{
    const double nearest = nearest_eigenvalue(op, lambda);
    if (std::abs(nearest - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda)))
        throw SpectralProximityError("resolvent requested at an eigenvalue", nearest);
}

} // namespace

GreenSolution green_at_origin(const RadialModel& model, const RadialGrid& grid)
{
    if (grid.grading < 2.0)
        throw ParameterError("green_at_origin: grading must be at least 2 to resolve the pole");
    const auto op = assemble_operator(grid, model, 0, true);
    const int N = grid.dimension;
    const double sigma = sphere_area(N);
    const auto n = op.size();

    Vector load = Vector::Zero(n);
    load[0] = 1.0 / sigma;
    GreenSolution gs;
    gs.grid = grid;
    gs.grid_ref = grid.describe();
    try {
        gs.G0 = solve_m_matrix(-op.K.diag, -op.K.off, load);
    } catch (const NumericError&) {
        throw NumericError("green_at_origin: system is not positive definite");
    }
    if (n > 1)
        gs.flux_normalization_residual = std::abs(sigma * op.K.off[0] * (gs.G0[0] - gs.G0[1]) - 1.0);

    const double r1 = grid.nodes.front();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = grid.nodes[static_cast<std::size_t>(i)];
        if (r > 10.0 * r1)
            break;
        gs.near_origin_deviation =
            std::max(gs.near_origin_deviation, std::abs(gs.G0[i] * std::pow(r, N - 2) * (N - 2) * sigma - 1.0));
    }
    return gs;
}

GreenSolution green_at_origin(const OperatorParams& params, const RadialGrid& grid)
{
    // only K enters, and K already carries Δ − Ṽ; the weighted mass plays no part
    return green_at_origin(RadialModel::of(params), grid);
}

std::vector<GreenBoundRow> verify_green_bound(GreenSolution& gs, const MEstimate& m_profile,
                                              std::span<const int> k_list)
{
    const int N = gs.grid.dimension;
    std::vector<GreenBoundRow> rows;
    for (int k : k_list) {
        if (k < 0)
            throw ParameterError("verify_green_bound: k must be nonnegative");
        GreenBoundRow row;
        row.k = k;
        for (std::size_t i = 0; i < gs.grid.size(); ++i) {
            const double r = gs.grid.nodes[i];
            const double value =
                gs.G0[static_cast<Eigen::Index>(i)] * std::pow(1.0 + interpolate_m(m_profile, r) * r, k) *
                std::pow(r, N - 2);
            if (value > row.C_k) {
                row.C_k = value;
                row.argmax_radius = r;
            }
        }
        gs.fitted_Ck[k] = row.C_k;
        rows.push_back(row);
    }
    return rows;
}

Vector solve_resolvent(const DiscreteOperator& op, double lambda, const Vector& f)
{
    if (f.size() != op.size())
        throw DimensionError("solve_resolvent: right-hand side length differs from the grid");
    const Vector rhs = op.M.cwiseProduct(f);
    if (lambda >= 0.0)
        return solve_m_matrix(lambda * op.M - op.K.diag, -op.K.off, rhs);

    guard_proximity(op, lambda);
    const auto n = static_cast<std::size_t>(op.size());
    std::vector<double> sub(n, 0.0), diag(n), super(n, 0.0), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        diag[i] = lambda * op.M[ii] - op.K.diag[ii];
        b[i] = rhs[ii];
        if (i + 1 < n)
            sub[i] = super[i] = -op.K.off[ii];
    }
    if (!solve_tridiagonal_pivoted(sub, diag, super, b))
        throw SpectralProximityError("resolvent system is singular", nearest_eigenvalue(op, lambda));
    return Eigen::Map<Vector>(b.data(), op.size());
}

ComplexVector solve_resolvent(const DiscreteOperator& op, std::complex<double> lambda, const ComplexVector& f)
{
    if (f.size() != op.size())
        throw DimensionError("solve_resolvent: right-hand side length differs from the grid");
    if (lambda.imag() == 0.0 && lambda.real() < 0.0)
        guard_proximity(op, lambda.real());
    using C = std::complex<double>;
    const auto n = static_cast<std::size_t>(op.size());
    std::vector<C> sub(n, 0.0), diag(n), super(n, 0.0), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        diag[i] = lambda * op.M[ii] - op.K.diag[ii];
        b[i] = op.M[ii] * f[ii];
        if (i + 1 < n)
            sub[i] = super[i] = -op.K.off[ii];
    }
    if (!solve_tridiagonal_pivoted(sub, diag, super, b))
        throw SpectralProximityError("resolvent system is singular", std::numeric_limits<double>::quiet_NaN());
    return Eigen::Map<ComplexVector>(b.data(), op.size());
}

double weighted_profile(const std::string& name, double r)
{
    if (name == "gauss@0")
        return std::exp(-r * r);
    if (name == "gauss@3")
        return std::exp(-(r - 3.0) * (r - 3.0));
    if (name == "gauss@6")
        return std::exp(-(r - 6.0) * (r - 6.0));
    if (name == "oscillatory")
        return std::sin(3.0 * r) * std::exp(-(r / 4.0) * (r / 4.0));
    if (name == "plateau")
        return 1.0 / (1.0 + std::exp(4.0 * (r - 5.0)));
    throw ParameterError("unknown test profile '" + name + "'");
}

std::vector<std::string> default_profile_family()
{
    return {"gauss@0", "gauss@3", "gauss@6", "oscillatory", "plateau"};
}

double radial_lp_norm(const Vector& values, const Vector& weights, double p)
{
    if (values.size() != weights.size())
        throw DimensionError("radial_lp_norm: size mismatch");
    return std::pow(weights.dot(values.cwiseAbs().array().pow(p).matrix()), 1.0 / p);
}

Vector radial_derivative(const RadialGrid& grid, const Vector& u)
{
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (u.size() != n)
        throw DimensionError("radial_derivative: size mismatch");
    Vector d(n);
    if (n == 1) {
        d[0] = 0.0;
        return d;
    }
    const auto& r = grid.nodes;
    d[0] = (u[1] - u[0]) / (r[1] - r[0]);
    d[n - 1] = (u[n - 1] - u[n - 2]) / (r[n - 1] - r[n - 2]);
    for (Eigen::Index i = 1; i + 1 < n; ++i)
        d[i] = (u[i + 1] - u[i - 1]) / (r[i + 1] - r[i - 1]);
    return d;
}

WeightedEstimateReport weighted_estimate_report(const OperatorParams& params, const WeightedEstimateSpec& spec)
{
    if (spec.f_family.empty())
        throw ParameterError("weighted_estimate_report: empty profile family");
    if (spec.domains.empty())
        throw ParameterError("weighted_estimate_report: no domains");
    if (!(spec.p > 1.0))
        throw ParameterError("weighted_estimate_report: p must exceed 1");
    for (double g : spec.gammas)
        if (!(g >= 0.0 && g <= params.beta()))
            throw ParameterError("weighted_estimate_report: gamma must lie in [0, beta]");

    const double p = spec.p;
    const double alpha = params.alpha(), beta = params.beta();
    WeightedEstimateReport report;
    report.p = p;
    report.domains = spec.domains;

    std::vector<std::string> names;
    for (double g : spec.gammas)
        names.push_back("|x|^" + fmt(g) + " u / f");
    names.push_back("V u / A u");
    names.push_back("(1+r^(alpha-1)) u' / (A u + u)");
    report.rows.resize(names.size());
    for (std::size_t e = 0; e < names.size(); ++e)
        report.rows[e].estimate = names[e];

    for (double R : spec.domains) {
        const int n = std::max(16, static_cast<int>(std::lround(spec.nodes_per_unit * R)));
        const auto grid = build_grid(params.dimension(), R, n, spec.grading);
        const auto op = assemble_operator(grid, params, 0, true);
        const Vector w = grid.lebesgue_weights();
        const Vector mu = sphere_area(params.dimension()) * op.M;
        const double lambda0 = p == 2.0 ? ground_state(op).lambda0 : 0.0;

        std::vector<double> best(names.size(), 0.0);
        std::vector<std::string> worst(names.size());
        double spectral = 0.0;
        for (const auto& name : spec.f_family) {
            Vector f(n), rg(n), V(n), grad_w(n);
            for (int i = 0; i < n; ++i) {
                const double r = grid.nodes[static_cast<std::size_t>(i)];
                f[i] = weighted_profile(name, r);
                V[i] = std::pow(r, beta);
                grad_w[i] = 1.0 + std::pow(r, alpha - 1.0);
            }
            const Vector u = solve_resolvent(op, 0.0, Vector(-f)); // A u = f
            const double fn = radial_lp_norm(f, w, p);
            const double un = radial_lp_norm(u, w, p);
            std::vector<double> ratios;
            for (double g : spec.gammas) {
                for (int i = 0; i < n; ++i)
                    rg[i] = std::pow(grid.nodes[static_cast<std::size_t>(i)], g) * u[i];
                ratios.push_back(radial_lp_norm(rg, w, p) / fn);
            }
            ratios.push_back(radial_lp_norm(V.cwiseProduct(u), w, p) / fn);
            const Vector du = radial_derivative(grid, u);
            ratios.push_back(radial_lp_norm(grad_w.cwiseProduct(du), w, p) / (fn + un));
            for (std::size_t e = 0; e < ratios.size(); ++e)
                if (ratios[e] > best[e]) {
                    best[e] = ratios[e];
                    worst[e] = name;
                }
            if (p == 2.0)
                spectral = std::max(spectral, std::abs(lambda0) * std::sqrt(mu.dot(u.cwiseAbs2())) /
                                                  std::sqrt(mu.dot(f.cwiseAbs2())));
        }
        for (std::size_t e = 0; e < names.size(); ++e) {
            report.rows[e].sup_ratio.push_back(best[e]);
            report.rows[e].worst_profile.push_back(worst[e]);
        }
        if (p == 2.0)
            report.spectral_bound_ratio.push_back(spectral);
    }
    report.all_bounded = true;
    for (auto& row : report.rows) {
        for (std::size_t j = 1; j < row.sup_ratio.size(); ++j)
            row.max_growth = std::max(row.max_growth, row.sup_ratio[j] / row.sup_ratio[j - 1] - 1.0);
        row.bounded = row.max_growth < 0.1;
        report.all_bounded = report.all_bounded && row.bounded;
    }
    return report;
}

} // namespace udiff
