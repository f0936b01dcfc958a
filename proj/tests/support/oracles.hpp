// Independent reference computations used only by the tests. None of them
// calls into the library: they re-derive each quantity by a different route
// (brute force, extended precision, Monte Carlo, dense linear algebra).
#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

inline double sphere_area(int N)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / boost::math::tgamma(0.5 * N);
}

// Double-exponential quadrature: a different family from the library's
// Gauss rules, and indifferent to algebraic endpoint singularities.
inline double quad(const Fn& f, double a, double b, double tol = 1e-13)
{
    static boost::math::quadrature::tanh_sinh<double> rule(12);
    if (a == b)
        return 0.0;
    return rule.integrate([&f](double x) { return f(x); }, a, b, tol);
}

// Lyapunov ratio maximum by a uniform scan of step h followed by ternary search.
inline std::pair<double, double> lyapunov_sup(int N, double alpha, double beta, double gamma, double r_max,
                                              double h)
{
    auto ratio = [=](double r) {
        const double phi = 1.0 + std::pow(r, gamma);
        return (gamma * (N + gamma - 2.0) * (1.0 + std::pow(r, alpha)) * std::pow(r, gamma - 2.0) -
                phi * std::pow(r, beta)) /
               phi;
    };
    double best_r = 0.0, best = 0.0;
    for (double r = h; r <= r_max; r += h) {
        const double v = ratio(r);
        if (v > best) {
            best = v;
            best_r = r;
        }
    }
    if (best_r > 0.0) {
        double lo = std::max(best_r - h, 0.0), hi = best_r + h;
        for (int i = 0; i < 200; ++i) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (ratio(m1) < ratio(m2))
                lo = m1;
            else
                hi = m2;
        }
        best_r = 0.5 * (lo + hi);
        best = ratio(best_r);
    }
    return {best, best_r};
}

using Dec50 = boost::multiprecision::cpp_dec_float_50;

// f₀(r) = σ r^{2−N} ∫₀^r ρ^{β+N−1}/(1+ρ^α) dρ
inline double f0(int N, double alpha, double beta, double r)
{
    const double integral =
        quad([=](double t) { return std::pow(t, beta + N - 1.0) / (1.0 + std::pow(t, alpha)); }, 0.0, r);
    return sphere_area(N) * std::pow(r, 2.0 - N) * integral;
}

// 1/m(0) by a dense geometric scan for the last sub-unit point and bisection.
inline double m_at_origin(int N, double alpha, double beta)
{
    const double ratio = 1.001;
    double r = 1e6;
    while (f0(N, alpha, beta, r) > 1.0)
        r /= ratio;
    double a = r, b = r * ratio;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (a + b);
        (f0(N, alpha, beta, mid) <= 1.0 ? a : b) = mid;
    }
    return 1.0 / a;
}

// Share of the sphere |y| = t lying inside B(x, r), |x| = s, via boost's ibeta.
inline double cap_share(int N, double s, double r, double t)
{
    if (s == 0.0)
        return t < r ? 1.0 : 0.0;
    const double below = (r - s + t) * (r + s - t) / (2.0 * s * t); // 1 − cos θ₀
    const double above = (s + t - r) * (s + t + r) / (2.0 * s * t); // 1 + cos θ₀
    if (below <= 0.0)
        return 0.0;
    if (above <= 0.0)
        return 1.0;
    const double half = 0.5 * boost::math::ibeta(0.5 * (N - 1), 0.5, std::min(1.0, below * above));
    return below <= above ? half : 1.0 - half;
}

// r^{2−N} ∫_{B(x,r)} Ṽ by double-exponential quadrature over spherical shells.
inline double critical_ratio_shells(int N, double alpha, double beta, double s, double r, double tol)
{
    auto density = [=](double t) { return std::pow(t, N - 1.0) * std::pow(t, beta) / (1.0 + std::pow(t, alpha)); };
    double total = 0.0;
    if (s < r)
        total += quad(density, 0.0, r - s, tol);
    if (s > 0.0)
        total += quad([&](double t) { return density(t) * cap_share(N, s, r, t); }, std::abs(s - r), s + r, tol);
    return sphere_area(N) * total * std::pow(r, 2.0 - N);
}

// m(x) with |x| = s: forward geometric scan (ratio 1.01) over [1e-6, 1e6]·(1+s)
// for the last sub-unit point, a 1.0001 rescan of that bracket, then bisection.
inline double m_dense_scan(int N, double alpha, double beta, double s)
{
    auto coarse = [&](double r) { return critical_ratio_shells(N, alpha, beta, s, r, 1e-8); };
    auto fine = [&](double r) { return critical_ratio_shells(N, alpha, beta, s, r, 1e-13); };
    double last = -1.0;
    for (double r = 1e-6 * (1.0 + s); r <= 1e6 * (1.0 + s); r *= 1.01)
        if (coarse(r) <= 1.0)
            last = r;
    double refined = -1.0;
    for (double r = last / 1.01; r <= last * 1.0201; r *= 1.0001)
        if (fine(r) <= 1.0)
            refined = r;
    double a = refined, b = refined * 1.0001;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (a + b);
        (fine(mid) <= 1.0 ? a : b) = mid;
    }
    return 1.0 / a;
}

// ∫_{B(x,r)} field(|y|) dy with |x| = s via cylindrical coordinates around the
// axis through x: dz dρ with the (N−2)-sphere of radius ρ.
inline double ball_integral_cylindrical(int N, const Fn& field, double s, double r)
{
    const double sigma = sphere_area(N - 1);
    auto slab = [&](double z) {
        const double rho_max = std::sqrt(std::max(0.0, r * r - z * z));
        if (rho_max == 0.0)
            return 0.0;
        return quad(
            [&](double rho) {
                return sigma * std::pow(rho, N - 2) * field(std::sqrt((s + z) * (s + z) + rho * rho));
            },
            0.0, rho_max, 1e-11);
    };
    if (s > 0.0 && s < r) // the origin is inside: split where the integrand kinks
        return quad(slab, -r, -s, 1e-11) + quad(slab, -s, r, 1e-11);
    return quad(slab, -r, r, 1e-11);
}

struct MonteCarlo {
    double mean;
    double standard_error;
};

// Uniform sampling of B(x, r) ⊂ ℝ^N by rejection from the cube.
inline MonteCarlo ball_integral_mc(int N, const Fn& field, double s, double r, std::size_t samples,
                                   std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double sum = 0.0, sum2 = 0.0;
    std::size_t accepted = 0;
    std::vector<double> y(static_cast<std::size_t>(N));
    while (accepted < samples) {
        double norm2 = 0.0;
        for (auto& c : y) {
            c = u(rng);
            norm2 += c * c;
        }
        if (norm2 > 1.0)
            continue;
        y[0] = s + r * y[0];
        double rad2 = y[0] * y[0];
        for (std::size_t i = 1; i < y.size(); ++i)
            rad2 += r * r * y[i] * y[i];
        const double v = field(std::sqrt(rad2));
        sum += v;
        sum2 += v * v;
        ++accepted;
    }
    const double volume = std::pow(std::numbers::pi, 0.5 * N) / boost::math::tgamma(0.5 * N + 1.0) * std::pow(r, N);
    const double mean = sum / samples;
    const double var = std::max(0.0, sum2 / samples - mean * mean);
    return {volume * mean, volume * std::sqrt(var / samples)};
}

// Dense generalized symmetric eigenvalues of (K, M), M diagonal, descending.
inline std::vector<double> dense_generalized_eigenvalues(const Eigen::MatrixXd& K, const Eigen::VectorXd& M)
{
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, Eigen::MatrixXd(M.asDiagonal()));
    std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + solver.eigenvalues().size());
    std::sort(ev.rbegin(), ev.rend());
    return ev;
}

} // namespace oracle
