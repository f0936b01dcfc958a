#include "udiff/operator_model.hpp"

#include "udiff/error.hpp"
#include "udiff/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace udiff {

double sphere_area(int dimension)
{
    const double half = 0.5 * dimension;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double ball_volume(int dimension, double radius)
{
    return sphere_area(dimension) * std::pow(radius, dimension) / dimension;
}

OperatorParams::OperatorParams(int dimension, double alpha, double beta, double p)
    : dimension_(dimension), alpha_(alpha), beta_(beta), p_(p), sphere_area_(0.0)
{
    if (dimension < 3)
        throw ParameterError("dimension N must be at least 3");
    if (!(alpha > 2.0))
        throw ParameterError("alpha must exceed 2");
    if (!(beta > alpha - 2.0))
        throw ParameterError("beta must exceed alpha - 2");
    if (!(p > 1.0) || !std::isfinite(p))
        throw ParameterError("p must lie in (1, inf)");
    sphere_area_ = udiff::sphere_area(dimension);
}

std::string OperatorParams::label() const
{
    std::ostringstream os;
    os << "N=" << dimension_ << " alpha=" << alpha_ << " beta=" << beta_ << " p=" << p_;
    return os.str();
}

CoefficientValues eval_coefficients(const OperatorParams& params, double r)
{
    if (!(r >= 0.0))
        throw DomainError("coefficients are defined for r >= 0 only");
    CoefficientValues c{};
    c.a = 1.0 + std::pow(r, params.alpha());
    c.V = std::pow(r, params.beta());
    c.q = 1.0 / c.a;
    c.Vtilde = c.V * c.q;
    return c;
}

double RadialModel::a(double r) const
{
    return diffusion_exponent ? 1.0 + std::pow(r, *diffusion_exponent) : 1.0;
}

double RadialModel::V(double r) const
{
    if (potential_scale == 0.0)
        return 0.0;
    return potential_scale * std::pow(r, potential_exponent);
}

RadialModel RadialModel::without_potential() const
{
    RadialModel m = *this;
    m.potential_scale = 0.0;
    return m;
}

RadialModel RadialModel::of(const OperatorParams& params)
{
    return RadialModel{params.dimension(), params.alpha(), params.beta(), 1.0};
}

RadialModel RadialModel::harmonic(int dimension)
{
    return RadialModel{dimension, std::nullopt, 2.0, 1.0};
}

RadialModel RadialModel::laplacian(int dimension)
{
    return RadialModel{dimension, std::nullopt, 0.0, 0.0};
}

double lyapunov_generator(const OperatorParams& params, double gamma, double r)
{
    const double N = params.dimension();
    return gamma * (N + gamma - 2.0) * (1.0 + std::pow(r, params.alpha())) * std::pow(r, gamma - 2.0)
           - (1.0 + std::pow(r, gamma)) * std::pow(r, params.beta());
}

double lyapunov_ratio(const OperatorParams& params, double gamma, double r)
{
    return lyapunov_generator(params, gamma, r) / (1.0 + std::pow(r, gamma));
}

LyapunovProbe lyapunov_constant(const OperatorParams& params, double gamma)
{
    if (!(gamma > 2.0))
        throw ParameterError("Lyapunov exponent gamma must exceed 2");

    constexpr double window_lo = 1e-6;
    constexpr double window_hi = 1e3;
    const auto ratio = [&](double r) { return lyapunov_ratio(params, gamma, r); };
    if (!(ratio(window_hi) < 0.0))
        throw RangeError("Lyapunov ratio is not yet negative at the end of the scan window");

    const auto samples = numerics::geomspace(window_lo, window_hi, 8001);
    const auto best = numerics::scan_maximize(ratio, samples);

    LyapunovProbe probe;
    probe.gamma = gamma;
    if (best.value > 0.0) {
        probe.C = best.value;
        probe.r_star = best.x;
    }
    return probe;
}

std::vector<ReverseHolderVerdict> classify_reverse_holder(const OperatorParams& params,
                                                          std::span<const double> q_values)
{
    const double gap = params.beta() - params.alpha();
    const double N = params.dimension();
    auto fmt = [](double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    auto verdict = [&](std::string label, double q, bool holds, const std::string& test) {
        ReverseHolderVerdict v;
        v.label = std::move(label);
        v.q = q;
        v.holds = holds;
        v.reason = "beta-alpha = " + fmt(gap) + (holds ? " satisfies " : " fails ") + test
                   + (holds ? "" : " (not implied)");
        return v;
    };

    std::vector<ReverseHolderVerdict> out;
    out.push_back(verdict("B_inf", std::numeric_limits<double>::infinity(), gap >= 0.0, "beta-alpha >= 0"));
    for (double q : q_values) {
        if (!(q > 1.0) || !std::isfinite(q))
            throw ParameterError("reverse Hoelder index q must lie in (1, inf)");
        out.push_back(verdict("B_q(q=" + fmt(q) + ")", q, gap > -N / q, "beta-alpha > -N/q = " + fmt(-N / q)));
    }
    out.push_back(verdict("B_{N/2}", 0.5 * N, gap > -2.0, "beta-alpha > -2"));
    out.push_back(verdict("B_N", N, gap > -1.0, "beta-alpha > -1"));
    return out;
}

} // namespace udiff
