#include <doctest.h>

#include "udiff/error.hpp"
#include "udiff/semigroup.hpp"

#include <cmath>

using namespace udiff;

namespace {

Vector gaussian(const RadialGrid& grid, double centre, double width)
{
    Vector u(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
        u[static_cast<Eigen::Index>(i)] = std::exp(-std::pow((grid.nodes[i] - centre) / width, 2));
    return u;
}

double factorial(int k)
{
    return std::tgamma(k + 1.0);
}

} // namespace

TEST_CASE("ground state evolves by its exponential")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto op = assemble_operator(build_grid(3, 20.0, 400, 2.0), p, 0, true);
    const auto gs = ground_state(op);
    const double times[] = {1.0};
    const EvolveOptions pure{0, 0};
    // Crank–Nicolson's amplification differs from e^{z} by z³/12 per step,
    // so the relative error at t=1 is λ³h²/12 to leading order.
    for (double h : {1e-3, 5e-4, 2.5e-4}) {
        const auto run = evolve(op, gs.psi, times, h, pure);
        const Vector expected = std::exp(gs.lambda0) * gs.psi;
        const double err = (run.states[0] - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff();
        const double predicted = std::abs(std::pow(gs.lambda0, 3)) * h * h / 12.0;
        CHECK(err == doctest::Approx(predicted).epsilon(0.05));
        if (h <= 2.5e-4)
            CHECK(err < 1e-6);
    }
}

TEST_CASE("nonnegative data stay nonnegative")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 20.0, 400, 2.0);
    const auto op = assemble_operator(grid, p, 0, true);
    const double times[] = {0.01, 0.1, 0.5, 1.0, 2.0};
    for (double centre : {0.0, 2.0, 8.0}) {
        const auto run = evolve(op, gaussian(grid, centre, 0.7), times, 1e-3);
        CHECK(run.initial_nonnegative);
        CHECK(run.positivity_ok);
        CHECK(run.min_relative >= -1e-12);
    }
    const auto ones = evolve(op, Vector::Ones(400), times, 1e-3);
    CHECK(ones.positivity_ok);
    CHECK_THROWS_AS(evolve(op, Vector::Ones(3), times, 1e-3), DimensionError);
    const double backwards[] = {1.0, 0.5};
    CHECK_THROWS_AS(evolve(op, Vector::Ones(400), backwards, 1e-3), ParameterError);
}

TEST_CASE("mass is conserved without potential and boundary flux")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 10.0, 300, 2.0);
    const auto op =
        assemble_operator(grid, RadialModel::of(p).without_potential(), 0, false, {OuterBoundary::ZeroFlux});
    const double times[] = {0.1, 0.5, 1.0, 3.0};
    const auto run = evolve(op, gaussian(grid, 3.0, 1.0), times, 1e-2);
    const double m0 = op.M.dot(gaussian(grid, 3.0, 1.0));
    for (double m : run.mass_trace)
        CHECK(std::abs(m - m0) <= 1e-10 * m0);
}

TEST_CASE("semigroup property at a fixed step")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 20.0, 400, 2.0);
    const auto op = assemble_operator(grid, p, 0, true);
    const EvolveOptions pure{0, 0};
    const Vector u0 = gaussian(grid, 1.0, 1.5);
    const double full[] = {0.75};
    const double first[] = {0.3};
    const double second[] = {0.45};
    const auto direct = evolve(op, u0, full, 1e-3, pure);
    const auto mid = evolve(op, u0, first, 1e-3, pure);
    const auto composed = evolve(op, mid.states[0], second, 1e-3, pure);
    const double diff = (direct.states[0] - composed.states[0]).cwiseAbs().maxCoeff();
    CHECK(diff <= 1e-8 * direct.states[0].cwiseAbs().maxCoeff());
}

TEST_CASE("long-time decay rate approaches the ground level")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 20.0, 400, 2.0);
    const auto op = assemble_operator(grid, p, 0, true);
    const double lambda0 = ground_state(op).lambda0;
    const double times[] = {4.0, 8.0};
    const auto run = evolve(op, gaussian(grid, 4.0, 2.0), times, 1e-3);
    auto norm = [&](const Vector& u) { return std::sqrt(u.dot(op.M.cwiseProduct(u))); };
    const double rate = std::log(norm(run.states[1]) / norm(run.states[0])) / 4.0;
    CHECK(rate == doctest::Approx(lambda0).epsilon(0.01));
}

TEST_CASE("domination of the potential semigroup")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 20.0, 400, 2.0);
    const Vector u0 = gaussian(grid, 2.0, 1.0);

    // identical generators give identical evolutions
    const auto free_op = assemble_operator(grid, RadialModel::of(p).without_potential(), 0, false);
    const auto free_op2 = assemble_operator(grid, p, 0, false);
    const double t1[] = {0.1, 1.0};
    const auto a = evolve(free_op, u0, t1, 1e-3);
    const auto b = evolve(free_op2, u0, t1, 1e-3);
    CHECK((a.states[1] - b.states[1]).cwiseAbs().maxCoeff() == 0.0);

    const double t0[] = {0.0};
    const auto zero = domination_check(p, grid, u0, t0, 1e-3);
    CHECK(zero.max_excess[0] == 0.0);

    const auto report = domination_check(p, grid, u0, t1, 1e-3);
    CHECK(report.holds);
    const auto halved = domination_check(p, grid, u0, t1, 5e-4);
    CHECK(halved.holds);
    for (double e : report.max_excess)
        CHECK(e <= 1e-10);
    CHECK_THROWS_AS(domination_check(p, grid, -u0, t1, 1e-3), ParameterError);
}

TEST_CASE("decay of the constant function")
{
    const OperatorParams p(3, 3.0, 2.0);
    const double radii[] = {20.0, 40.0, 80.0};
    const auto profile = decay_of_one(p, 1.0, radii);
    CHECK(profile.decreasing_in_R);
    CHECK(profile.holds);
    DecayOptions fine;
    fine.step = 5e-4;
    const auto refined = decay_of_one(p, 1.0, radii, fine);
    CHECK(refined.decreasing_in_R);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(refined.outer_max[i] == doctest::Approx(profile.outer_max[i]).epsilon(0.05));

    const double small_radius[] = {20.0};
    const auto early = decay_of_one(p, 1e-5, small_radius);
    CHECK(early.outer_max[0] == doctest::Approx(1.0).epsilon(1e-3));

    // a steeper potential empties the outer region at least as fast (reported)
    const auto steep = decay_of_one(OperatorParams(3, 3.0, 4.0), 1.0, small_radius);
    const auto mild = decay_of_one(p, 1.0, small_radius);
    MESSAGE("outer max beta=4: " << steep.outer_max[0] << "  beta=2: " << mild.outer_max[0]);
}

TEST_CASE("channel degeneracy")
{
    for (int ell = 0; ell < 12; ++ell) {
        CHECK(channel_degeneracy(ell, 3) == doctest::Approx(2 * ell + 1));
        CHECK(channel_degeneracy(ell, 4) == doctest::Approx((ell + 1) * (ell + 1)));
        for (int N : {5, 7}) {
            const double expected = (2 * ell + N - 2) * factorial(ell + N - 3) / (factorial(ell) * factorial(N - 2));
            CHECK(channel_degeneracy(ell, N) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("heat kernel diagonal")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 20.0, 400, 2.0);
    double previous = INFINITY;
    for (double t : {0.1, 0.25, 0.5, 1.0, 2.0}) {
        const auto spectra = kernel_spectra(p, grid, t);
        const auto kd = kernel_diagnostics(spectra, grid, t);
        CHECK(std::isfinite(kd.kernel_sup));
        CHECK(kd.kernel_sup <= previous);
        CHECK(kd.tail_bound < 1e-12);
        previous = kd.kernel_sup;
    }

    // long times: single-mode dominance
    const double t = 6.0;
    const auto spectra = kernel_spectra(p, grid, t);
    const auto kd = kernel_diagnostics(spectra, grid, t);
    const auto& psi = spectra[0].eigenvectors[0];
    const double single = std::exp(spectra[0].eigenvalues[0] * t) * psi.cwiseAbs2().maxCoeff() / (4 * M_PI);
    CHECK(kd.kernel_sup == doctest::Approx(single).epsilon(1e-3));

    // truncating too early is refused
    std::vector<SpectrumResult> short_list{solve_spectrum(assemble_operator(grid, p, 0, true), 2)};
    CHECK_THROWS_AS(kernel_diagnostics(short_list, grid, 0.5), AccuracyError);
}

TEST_CASE("heat kernel diagonal is stable under refinement")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto coarse = build_grid(3, 20.0, 400, 2.0);
    const auto fine = build_grid(3, 20.0, 800, 2.0);
    const double t = 0.5;
    const auto a = kernel_diagnostics(kernel_spectra(p, coarse, t), coarse, t);
    const auto b = kernel_diagnostics(kernel_spectra(p, fine, t), fine, t);
    CHECK(std::abs(a.kernel_sup - b.kernel_sup) < 0.05 * b.kernel_sup);
}

TEST_CASE("explicit kernel matrix is symmetric")
{
    const OperatorParams p(3, 3.0, 2.0);
    const auto grid = build_grid(3, 6.0, 40, 2.0);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(40, 40);
    for (int ell = 0; ell <= 3; ++ell) {
        const auto s = solve_spectrum(assemble_operator(grid, p, ell, true), 40);
        for (int k = 0; k < 40; ++k)
            P += channel_degeneracy(ell, 3) / (4 * M_PI) * std::exp(s.eigenvalues[k] * 0.3) * s.eigenvectors[k] *
                 s.eigenvectors[k].transpose();
    }
    CHECK((P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * P.cwiseAbs().maxCoeff());
}
