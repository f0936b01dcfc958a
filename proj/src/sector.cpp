#include "udiff/sector.hpp"

#include "udiff/error.hpp"
#include "udiff/green.hpp"
#include "udiff/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

namespace udiff {
namespace {

void require_positive(double c_tilde)
{
    if (!(c_tilde > 0.0) || !std::isfinite(c_tilde))
        throw ParameterError("c_tilde must be positive");
}

double shifted_profile(const OperatorParams& params, double K, double r)
{
    return K * std::pow(r, params.alpha() - 2.0) - std::pow(r, params.beta());
}

} // namespace

double dissipativity_coefficient(const OperatorParams& params)
{
    const double a = params.alpha();
    return a * (params.dimension() - 2.0 + a) / params.p();
}

double feasible_shift(const OperatorParams& params, double c_tilde)
{
    require_positive(c_tilde);
    const double K = dissipativity_coefficient(params) + c_tilde;
    const double a = params.alpha(), b = params.beta();
    const double r_star = std::pow(K * (a - 2.0) / b, 1.0 / (b - a + 2.0));
    return std::max(0.0, shifted_profile(params, K, r_star));
}

double feasible_shift_scan(const OperatorParams& params, double c_tilde)
{
    require_positive(c_tilde);
    const double K = dissipativity_coefficient(params) + c_tilde;
    const auto radii = numerics::geomspace(1e-6, 1e6, 24001);
    const auto best = numerics::scan_maximize([&](double r) { return shifted_profile(params, K, r); }, radii);
    return std::max(0.0, best.value);
}

SectorAngle sector_angle(const OperatorParams& params, double c_tilde)
{
    require_positive(c_tilde);
    const double p = params.p(), a = params.alpha();
    SectorAngle s;
    s.delta = std::sqrt((p - 2.0) * (p - 2.0) / (4.0 * (p - 1.0)) + a * a / (4.0 * c_tilde));
    s.theta_alpha = std::atan(s.delta);
    s.theta_rotation = std::atan(1.0 / s.delta);
    return s;
}

double default_c_tilde(const OperatorParams& params)
{
    const auto grid = numerics::geomspace(1e-2, 1e2, 401);
    double best = grid.front();
    double best_value = std::numeric_limits<double>::infinity();
    for (double c : grid) {
        const double value = feasible_shift(params, c) + c;
        if (value < best_value) {
            best_value = value;
            best = c;
        }
    }
    return best;
}

double dissipativity_slack(const OperatorParams& params, double c_tilde, double omega, std::span<const double> radii)
{
    const double K0 = dissipativity_coefficient(params);
    double slack = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        const double ra = std::pow(r, params.alpha() - 2.0);
        slack = std::min(slack, -c_tilde * ra - (K0 * ra - std::pow(r, params.beta()) - omega));
    }
    return slack;
}

std::vector<RayScan> resolvent_norm_scan(const DiscreteOperator& op, std::span<const double> angles,
                                         std::span<const double> moduli, double p, std::uint64_t seed, int samples)
{
    using C = std::complex<double>;
    const auto n = static_cast<int>(op.size());
    const bool exact = p == 2.0;
    std::vector<double> spectrum;
    if (exact)
        spectrum = top_eigenvalues(op, n);

    std::vector<Vector> family;
    Vector weights;
    if (!exact) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int s = 0; s < samples; ++s) {
            Vector f(n);
            for (auto& x : f)
                x = normal(rng);
            family.push_back(f);
        }
        weights = op.grid.lebesgue_weights();
    }
    const auto lp = [&](const Eigen::VectorXd& abs_values) { return radial_lp_norm(abs_values, weights, p); };

    std::vector<RayScan> rays;
    for (double phi : angles) {
        if (!(phi > std::numbers::pi / 2 - 1e-15 && phi < std::numbers::pi))
            throw ParameterError("ray angles must lie in [pi/2, pi)");
        RayScan ray;
        ray.angle = phi;
        ray.exact = exact;
        ray.bound = 1.0 / std::sin(std::numbers::pi - phi);
        for (double rho : moduli) {
            if (!(rho > 0.0))
                throw ParameterError("ray moduli must be positive");
            const C lambda = std::polar(rho, phi);
            double norm = 0.0;
            if (exact) {
                for (double ev : spectrum) {
                    const double d = std::abs(lambda - ev);
                    if (d <= 1e-12 * std::max(1.0, rho))
                        throw SpectralProximityError("ray passes through an eigenvalue", ev);
                    norm = std::max(norm, 1.0 / d);
                }
            } else {
                for (const auto& f : family) {
                    const ComplexVector u = solve_resolvent(op, lambda, ComplexVector(f.cast<C>()));
                    norm = std::max(norm, lp(u.cwiseAbs()) / lp(f.cwiseAbs()));
                }
            }
            ray.moduli.push_back(rho);
            ray.norms.push_back(norm);
            ray.sup_scaled = std::max(ray.sup_scaled, rho * norm);
        }
        ray.holds = !exact || ray.sup_scaled <= ray.bound + 1e-8;
        rays.push_back(std::move(ray));
    }
    return rays;
}

SectorReport analyze_sector(const OperatorParams& params, const DiscreteOperator& op, double c_tilde,
                            std::span<const double> angles, std::span<const double> moduli, std::uint64_t seed)
{
    SectorReport report;
    report.c_tilde = c_tilde > 0.0 ? c_tilde : default_c_tilde(params);
    report.omega = feasible_shift(params, report.c_tilde);
    report.omega_scan = feasible_shift_scan(params, report.c_tilde);
    report.angle = sector_angle(params, report.c_tilde);
    const auto radii = numerics::geomspace(1e-4, 1e4, 20001);
    report.min_slack = dissipativity_slack(params, report.c_tilde, report.omega, radii);
    report.rays = resolvent_norm_scan(op, angles, moduli, params.p(), seed);
    return report;
}

} // namespace udiff
