#include "udiff/auxiliary.hpp"

#include "udiff/error.hpp"
#include "udiff/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace udiff {

double cap_fraction(int dimension, double s, double r, double t)
{
    if (s <= 0.0)
        return t < r ? 1.0 : 0.0;
    if (t <= 0.0)
        return s < r ? 1.0 : 0.0;
    // 1 ∓ cos θ₀ in factored form: small balls far out (r ≪ s) would otherwise
    // lose (s/r)² digits to cancellation.
    const double one_minus = (r - s + t) * (r + s - t) / (2.0 * s * t);
    const double one_plus = (s + t - r) * (s + t + r) / (2.0 * s * t);
    if (one_minus <= 0.0)
        return 0.0;
    if (one_plus <= 0.0)
        return 1.0;
    const double sin2 = std::min(1.0, one_minus * one_plus);
    const double half = 0.5 * numerics::regularized_incomplete_beta(0.5 * (dimension - 1), 0.5, sin2);
    return one_minus <= one_plus ? half : 1.0 - half;
}

double ball_integral_fixed(int dimension, const RadialField& field, double s, double r, int order)
{
    const double sigma = sphere_area(dimension);
    const int power = dimension - 1;
    double total = 0.0;
    double cap_lo = 0.0;
    if (s < r) {
        const double inner = r - s;
        total += numerics::integrate_clustered(
            [&](double t) { return field(t) * std::pow(t, power); }, 0.0, inner, order);
        cap_lo = inner;
    } else {
        cap_lo = s - r;
    }
    if (s > 0.0) {
        total += numerics::integrate_clustered(
            [&](double t) { return field(t) * std::pow(t, power) * cap_fraction(dimension, s, r, t); }, cap_lo,
            s + r, order);
    }
    return sigma * total;
}

double ball_integral_radial(int dimension, const RadialField& field, const BallIntegralSpec& spec)
{
    if (!(spec.center_radius >= 0.0) || !(spec.radius > 0.0) || spec.quadrature_nodes < 2)
        throw ParameterError("ball integral needs s >= 0, r > 0 and at least two nodes");
    int order = spec.quadrature_nodes;
    double previous = ball_integral_fixed(dimension, field, spec.center_radius, spec.radius, order);
    double change = std::numeric_limits<double>::infinity();
    for (int doubling = 0; doubling < 6; ++doubling) {
        order *= 2;
        const double current = ball_integral_fixed(dimension, field, spec.center_radius, spec.radius, order);
        change = std::abs(current - previous);
        previous = current;
        if (change <= 1e-12 * std::abs(current))
            return current;
    }
    if (change > 1e-4 * std::abs(previous))
        throw AccuracyError("ball integral did not converge under node doubling");
    return previous;
}

namespace {

RadialField vtilde_field(const OperatorParams& params)
{
    const double alpha = params.alpha(), beta = params.beta();
    return [alpha, beta](double t) { return std::pow(t, beta) / (1.0 + std::pow(t, alpha)); };
}

} // namespace

double critical_ratio(const OperatorParams& params, double s, double r)
{
    const double integral = ball_integral_radial(params.dimension(), vtilde_field(params), {s, r, 32});
    return integral * std::pow(r, 2.0 - params.dimension());
}

double m_function(const OperatorParams& params, double s, const MOptions& options)
{
    if (!(s >= 0.0))
        throw DomainError("m(x) needs |x| >= 0");
    const int N = params.dimension();
    const auto field = vtilde_field(params);
    const auto fast = [&](double r) {
        return ball_integral_fixed(N, field, s, r, options.scan_order) * std::pow(r, 2.0 - N);
    };
    const auto accurate = [&](double r) { return critical_ratio(params, s, r); };

    const double lo = options.window_lo * (1.0 + s);
    const double hi = options.window_hi * (1.0 + s);
    const double log_ratio = std::log(options.scan_ratio);
    const auto steps = static_cast<long>(std::ceil(std::log(hi / lo) / log_ratio));
    const auto point = [&](long k) { return k >= steps ? hi : lo * std::exp(log_ratio * static_cast<double>(k)); };

    if (!(fast(hi) > 1.0))
        throw RangeError("f_x(r) does not exceed 1 inside the scan window");

    // The supremum sits at the last sub-unit sample: walk down from the top.
    long k = steps - 1;
    while (k >= 0 && fast(point(k)) > 1.0)
        --k;
    if (k < 0)
        throw RangeError("f_x(r) never drops to 1 inside the scan window");

    // Confirm the bracket with the converged quadrature.
    while (k >= 0 && accurate(point(k)) > 1.0)
        --k;
    if (k < 0)
        throw RangeError("f_x(r) never drops to 1 inside the scan window");
    while (k + 1 < steps && accurate(point(k + 1)) <= 1.0)
        ++k;

    double a = point(k), b = point(k + 1);
    while ((b - a) > options.bisection_rel_tol * a) {
        const double mid = std::sqrt(a * b);
        if (accurate(mid) <= 1.0)
            a = mid;
        else
            b = mid;
    }
    return 1.0 / (0.5 * (a + b));
}

MEstimate fit_m_exponent(const OperatorParams& params, std::span<const double> radii, const MOptions& options)
{
    if (radii.size() < 4)
        throw ParameterError("fitting the m exponent needs at least four radii");
    const auto [min_it, max_it] = std::minmax_element(radii.begin(), radii.end());
    const bool spans = *min_it > 0.0 ? *max_it >= 100.0 * (1.0 - 1e-12) * *min_it : *max_it >= 99.0;
    if (!spans)
        throw ParameterError("radii must span at least two decades");

    MEstimate est;
    est.radii.assign(radii.begin(), radii.end());
    std::vector<double> lx, ly;
    for (double s : radii) {
        const double m = m_function(params, s, options);
        est.m_values.push_back(m);
        lx.push_back(std::log1p(s));
        ly.push_back(std::log(m));
    }
    const auto fit = numerics::fit_line(lx, ly);
    est.fitted_exponent = fit.slope;
    est.fitted_constant = std::exp(fit.intercept);
    est.target_exponent = 0.5 * (params.beta() - params.alpha());
    est.success = est.fitted_exponent >= est.target_exponent - 0.1;
    return est;
}

double interpolate_m(const MEstimate& profile, double s)
{
    const auto& xs = profile.radii;
    const auto& ms = profile.m_values;
    if (xs.empty() || xs.size() != ms.size())
        throw ParameterError("empty m profile");
    if (xs.size() == 1 || s <= xs.front())
        return ms.front();
    if (s >= xs.back()) {
        const double exponent = std::log(ms.back() / ms[ms.size() - 2])
                                / (std::log1p(xs.back()) - std::log1p(xs[xs.size() - 2]));
        return ms.back() * std::pow((1.0 + s) / (1.0 + xs.back()), exponent);
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), s);
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double x0 = std::log1p(xs[j - 1]), x1 = std::log1p(xs[j]);
    const double w = (std::log1p(s) - x0) / (x1 - x0);
    return std::exp((1.0 - w) * std::log(ms[j - 1]) + w * std::log(ms[j]));
}

RHConstantReport estimate_rh_constant(int dimension, const RadialField& field, double q_index,
                                      std::span<const double> centers, std::span<const double> radii)
{
    if (centers.empty() || radii.empty())
        throw ParameterError("reverse Hoelder estimate needs centers and radii");
    if (!(q_index > 1.0))
        throw ParameterError("reverse Hoelder index must exceed 1");
    const bool infinite = std::isinf(q_index);
    const RadialField powered = [&](double t) { return std::pow(field(t), q_index); };

    RHConstantReport report;
    report.q_index = q_index;
    report.constant_estimate = -std::numeric_limits<double>::infinity();
    for (double s : centers) {
        for (double r : radii) {
            const double volume = ball_volume(dimension, r);
            const double mean = ball_integral_radial(dimension, field, {s, r, 32}) / volume;
            if (!(mean > 0.0))
                continue;
            double upper = 0.0;
            if (infinite) {
                const auto samples = numerics::linspace(std::max(0.0, s - r), s + r, 257);
                upper = numerics::scan_maximize(field, samples).value;
            } else {
                upper = std::pow(ball_integral_radial(dimension, powered, {s, r, 32}) / volume, 1.0 / q_index);
            }
            const double ratio = upper / mean;
            ++report.sample_count;
            if (ratio > report.constant_estimate) {
                report.constant_estimate = ratio;
                report.worst_center_radius = s;
                report.worst_radius = r;
            }
        }
    }
    return report;
}

RHConstantReport estimate_rh_constant(const OperatorParams& params, double q_index,
                                      std::span<const double> centers, std::span<const double> radii)
{
    return estimate_rh_constant(params.dimension(), vtilde_field(params), q_index, centers, radii);
}

} // namespace udiff
