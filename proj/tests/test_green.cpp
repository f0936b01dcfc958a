#include <doctest.h>

#include "udiff/error.hpp"
#include "udiff/green.hpp"
#include "udiff/numerics.hpp"
#include "udiff/semigroup.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace udiff;

namespace {

Eigen::MatrixXd dense(const SymTridiagonal& K)
{
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(K.size(), K.size());
    D.diagonal() = K.diag;
    for (Eigen::Index i = 0; i + 1 < K.size(); ++i)
        D(i, i + 1) = D(i + 1, i) = K.off[i];
    return D;
}

// G(r, 0) = ∫₀^∞ p̃(t, r, 0) dt, by evolving a unit load under Δ − Ṽ with the
// Lebesgue mass and integrating the states in time (trapezoid rule on a
// logarithmic ladder of uniform segments).
Vector green_by_time_integration(const OperatorParams& p, const RadialGrid& grid, double T)
{
    auto op = assemble_operator(grid, p, 0, true);
    const double sigma = sphere_area(grid.dimension);
    op.M = grid.lebesgue_weights() / sigma;
    Vector u = Vector::Zero(op.size());
    u[0] = 1.0 / (sigma * op.M[0]);
    Vector integral = Vector::Zero(op.size());
    double start = 0.0;
    for (double end = 1e-6; start < T; end = std::min(T, end * 10.0)) {
        const int samples = 400;
        std::vector<double> times;
        for (int j = 1; j <= samples; ++j)
            times.push_back((end - start) * j / samples);
        const auto run = evolve(op, u, times, (end - start) / (4.0 * samples));
        const double dt = (end - start) / samples;
        Vector prev = u;
        for (const auto& s : run.states) {
            integral += 0.5 * dt * (prev + s);
            prev = s;
        }
        u = run.states.back();
        start = end;
    }
    return integral;
}

} // namespace

TEST_CASE("Laplacian Green function is the truncated Newtonian kernel")
{
    for (int N : {3, 4}) {
        const double R = 10.0;
        const auto grid = build_grid(N, R, 400, 2.0);
        const auto gs = green_at_origin(RadialModel::laplacian(N), grid);
        const double sigma = sphere_area(N);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double r = grid.nodes[i];
            const double corrected = (std::pow(r, 2.0 - N) - std::pow(R, 2.0 - N)) / ((N - 2) * sigma);
            CHECK(gs.G0[static_cast<Eigen::Index>(i)] == doctest::Approx(corrected).epsilon(1e-9));
            // far from the wall the boundary correction is negligible
            if (std::pow(r / R, N - 2) < 5e-3) {
                const double newtonian = std::pow(r, 2.0 - N) / ((N - 2) * sigma);
                CHECK(gs.G0[static_cast<Eigen::Index>(i)] == doctest::Approx(newtonian).epsilon(1e-2));
            }
        }
        CHECK(gs.near_origin_deviation < 0.02);
        CHECK(gs.flux_normalization_residual < 1e-12);

        MEstimate flat;
        flat.radii = {1.0, 10.0, 100.0, 1000.0};
        flat.m_values = {1.0, 1.0, 1.0, 1.0};
        GreenSolution copy = gs;
        const int k0[] = {0};
        const auto rows = verify_green_bound(copy, flat, k0);
        CHECK(rows[0].C_k == doctest::Approx(1.0 / ((N - 2) * sigma)).epsilon(1e-3));
    }
    CHECK_THROWS_AS(green_at_origin(RadialModel::laplacian(3), build_grid(3, 10.0, 100, 1.5)), ParameterError);
}

TEST_CASE("Green function with potential")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 20.0, 400, 2.0);
    const auto gs = green_at_origin(p, grid);
    CHECK(gs.G0.minCoeff() > 0.0);
    for (Eigen::Index i = 1; i < gs.G0.size(); ++i)
        CHECK(gs.G0[i] < gs.G0[i - 1]);
    CHECK(gs.near_origin_deviation < 0.02);

    // decays faster than the free kernel
    const auto free = green_at_origin(RadialModel::laplacian(3), grid);
    for (Eigen::Index i = 10; i < gs.G0.size(); ++i)
        CHECK(gs.G0[i] < free.G0[i]);

    // eigen-expansion route with the Lebesgue mass
    auto op = assemble_operator(grid, p, 0, true);
    const double sigma = 4 * M_PI;
    op.M = grid.lebesgue_weights() / sigma;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(-dense(op.K), Eigen::MatrixXd(op.M.asDiagonal()));
    Vector expansion = Vector::Zero(op.size());
    for (Eigen::Index k = 0; k < op.size(); ++k) {
        const Vector psi = es.eigenvectors().col(k);
        expansion += psi[0] * psi / (sigma * es.eigenvalues()[k]);
    }
    for (Eigen::Index i = 0; i < op.size(); i += 7)
        CHECK(gs.G0[i] == doctest::Approx(expansion[i]).epsilon(1e-8));

    // time-integration route: tail e^{λ₀T} < 1e-8
    const double lambda0 = -es.eigenvalues()[0];
    const double T = std::log(1e-8) / lambda0;
    const Vector timed = green_by_time_integration(p, grid, T);
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (grid.nodes[i] > 5.0 && grid.nodes[i] < 10.0)
            CHECK(gs.G0[static_cast<Eigen::Index>(i)] == doctest::Approx(timed[static_cast<Eigen::Index>(i)]).epsilon(1e-2));
}

TEST_CASE("decay constants against m")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto radii = numerics::geomspace(1e-2, 200.0, 24);
    const auto profile = fit_m_exponent(p, radii);
    const int ks[] = {0, 2, 4};
    auto small = green_at_origin(p, build_grid(3, 40.0, 800, 2.0));
    auto large = green_at_origin(p, build_grid(3, 80.0, 1600, 2.0));
    const auto a = verify_green_bound(small, profile, ks);
    const auto b = verify_green_bound(large, profile, ks);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::isfinite(a[j].C_k));
        CHECK(b[j].C_k / a[j].C_k - 1.0 < 0.1);
        if (j > 0)
            CHECK(a[j].C_k >= a[j - 1].C_k);
    }
    CHECK(small.fitted_Ck.size() == 3);
}

TEST_CASE("resolvent solves")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 20.0, 400, 2.0);
    const auto op = assemble_operator(grid, p, 0, true);
    const auto gs = ground_state(op);

    const Vector u = solve_resolvent(op, 0.0, gs.psi);
    CHECK((u - gs.psi / (-gs.lambda0)).cwiseAbs().maxCoeff() <= 1e-9 * gs.psi.maxCoeff());

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector f(op.size());
    for (auto& x : f)
        x = unif(rng);
    for (double lambda : {0.0, 1.0, 30.0}) {
        const Vector v = solve_resolvent(op, lambda, f);
        CHECK(v.minCoeff() >= -1e-12 * f.cwiseAbs().maxCoeff());
        const Vector residual = lambda * op.M.cwiseProduct(v) - op.K.multiply(v) - op.M.cwiseProduct(f);
        CHECK(residual.norm() <= 1e-10 * op.M.cwiseProduct(f).norm());
    }

    // residual oracle: one step of iterative refinement changes nothing
    Vector g = Vector::Random(op.size());
    const Vector v = solve_resolvent(op, 1.0, g);
    const Vector r = op.M.cwiseProduct(g) - (op.M.cwiseProduct(v) - op.K.multiply(v));
    const Vector correction = solve_resolvent(op, 1.0, r.cwiseQuotient(op.M));
    CHECK(correction.norm() <= 1e-10 * v.norm());

    // R(λ) − R(μ) = (μ − λ) R(λ) R(μ)
    const Vector r0 = solve_resolvent(op, 0.0, g);
    const Vector r1 = solve_resolvent(op, 1.0, g);
    const Vector r01 = solve_resolvent(op, 0.0, r1);
    CHECK((r0 - r1 - r01).norm() <= 1e-8 * r0.norm());

    // complex parameter: compare with the real solver on the real axis
    const ComplexVector cz = solve_resolvent(op, std::complex<double>(1.0, 0.0), ComplexVector(g.cast<std::complex<double>>()));
    CHECK((cz.real() - r1).norm() <= 1e-12 * r1.norm());
    const std::complex<double> lam(-2.0, 5.0);
    const ComplexVector w = solve_resolvent(op, lam, ComplexVector(g.cast<std::complex<double>>()));
    ComplexVector res = lam * op.M.cast<std::complex<double>>().cwiseProduct(w) - op.K.multiply(w.real()).cast<std::complex<double>>() -
                        std::complex<double>(0, 1) * op.K.multiply(w.imag()).cast<std::complex<double>>() -
                        op.M.cwiseProduct(g).cast<std::complex<double>>();
    CHECK(res.norm() <= 1e-10 * op.M.cwiseProduct(g).norm());

    // at and near an eigenvalue
    CHECK_THROWS_AS(solve_resolvent(op, gs.lambda0, g), SpectralProximityError);
    try {
        solve_resolvent(op, gs.lambda0, g);
    } catch (const SpectralProximityError& e) {
        CHECK(e.nearest_eigenvalue == doctest::Approx(gs.lambda0).epsilon(1e-14));
    }
    CHECK_NOTHROW(solve_resolvent(op, gs.lambda0 - 0.5, g));
}

TEST_CASE("weighted estimates")
{
    const OperatorParams p(3, 3.0, 2.0);
    WeightedEstimateSpec spec;
    spec.gammas = {0.0, 1.0, 2.0};
    const auto report = weighted_estimate_report(p, spec);
    CHECK(report.rows.size() == 5);
    CHECK(report.all_bounded);
    for (double ratio : report.spectral_bound_ratio)
        CHECK(ratio <= 1.0 + 1e-12);

    WeightedEstimateSpec cubic = spec;
    cubic.p = 3.0;
    CHECK(weighted_estimate_report(p.with_p(3.0), cubic).all_bounded);

    WeightedEstimateSpec bad = spec;
    bad.gammas = {2.5};
    CHECK_THROWS_AS(weighted_estimate_report(p, bad), ParameterError);
    bad = spec;
    bad.f_family.clear();
    CHECK_THROWS_AS(weighted_estimate_report(p, bad), ParameterError);
}

TEST_CASE("weighted ratios for the ground state in closed form")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 20.0, 400, 2.0);
    const auto op = assemble_operator(grid, p, 0, true);
    const auto gs = ground_state(op);
    const Vector u = solve_resolvent(op, 0.0, Vector(-gs.psi));
    const Vector w = grid.lebesgue_weights();
    for (double gamma : {0.0, 1.0, 2.0}) {
        Vector ru(u.size()), rpsi(u.size());
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double rg = std::pow(grid.nodes[static_cast<std::size_t>(i)], gamma);
            ru[i] = rg * u[i];
            rpsi[i] = rg * gs.psi[i];
        }
        const double computed = radial_lp_norm(ru, w, 2.0) / radial_lp_norm(gs.psi, w, 2.0);
        const double closed = radial_lp_norm(rpsi, w, 2.0) / (std::abs(gs.lambda0) * radial_lp_norm(gs.psi, w, 2.0));
        CHECK(computed == doctest::Approx(closed).epsilon(1e-9));
    }
}

TEST_CASE("discrete norms and derivatives")
{
    const auto grid = build_grid(3, 2.0, 200, 1.0);
    const Vector w = grid.lebesgue_weights(InnerBoundary::ZeroFlux, OuterBoundary::ZeroFlux);
    CHECK(radial_lp_norm(Vector::Ones(200), w, 3.0) == doctest::Approx(std::cbrt(ball_volume(3, 2.0))).epsilon(1e-12));
    Vector sq(200);
    for (int i = 0; i < 200; ++i)
        sq[i] = grid.nodes[i] * grid.nodes[i];
    const Vector d = radial_derivative(grid, sq);
    for (int i = 1; i < 199; ++i)
        CHECK(d[i] == doctest::Approx(2 * grid.nodes[i]).epsilon(1e-12));
    CHECK_THROWS_AS(weighted_profile("nope", 1.0), ParameterError);
}
