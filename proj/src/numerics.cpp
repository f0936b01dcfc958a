#include "udiff/numerics.hpp"

#include "udiff/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

namespace udiff::numerics {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

// Boost's recursive driver leaves leaf error estimates in the units of
// [−1, 1]; this one rescales them by the half-width before comparing.
double adaptive_segment(const ScalarFn& f, double a, double b, double tol, int depth, double& err)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double local = 0.0;
    double l1 = 0.0;
    const double value = half * Rule::integrate([&](double x) { return f(mid + half * x); }, -1.0, 1.0, 0, 0.0,
                                                &local, &l1);
    local *= std::abs(half);
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(half) * l1;
    if (local <= std::max(tol, roundoff) || depth == 0 || !(mid > a && mid < b)) {
        err += local;
        return value;
    }
    return adaptive_segment(f, a, mid, 0.5 * tol, depth - 1, err) +
           adaptive_segment(f, mid, b, 0.5 * tol, depth - 1, err);
}

} // namespace

double integrate(const ScalarFn& f, double a, double b, double rel_tol, double abs_tol)
{
    if (a == b)
        return 0.0;
    double first = 0.0;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double rough = half * Rule::integrate([&](double x) { return f(mid + half * x); }, -1.0, 1.0, 0, 0.0,
                                                &first);
    const double target = std::max(rel_tol * std::abs(rough), abs_tol);
    double err = 0.0;
    const double value = adaptive_segment(f, a, b, target, 40, err);
    if (err > 10.0 * rel_tol * std::abs(value) + abs_tol)
        throw AccuracyError("adaptive quadrature did not converge");
    return value;
}

namespace {

std::pair<std::vector<double>, std::vector<double>> compute_gauss_legendre(int order)
{
    std::vector<double> x(order), w(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = order * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = w[order - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {std::move(x), std::move(w)};
}

} // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order)
{
    if (order < 1)
        throw ParameterError("Gauss-Legendre order must be positive");
    static std::mutex mutex;
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end())
        it = cache.emplace(order, compute_gauss_legendre(order)).first;
    return it->second;
}

double integrate_clustered(const ScalarFn& f, double a, double b, int order)
{
    if (a == b)
        return 0.0;
    const auto& [x, w] = gauss_legendre(order);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = 0.5 * (x[i] + 1.0); // u in (0,1)
        const double c = std::cos(std::numbers::pi * u);
        const double t = a + half * (1.0 - c);
        const double jac = half * std::numbers::pi * std::sin(std::numbers::pi * u) * 0.5;
        sum += w[i] * jac * f(t);
    }
    return sum;
}

Extremum golden_section_maximize(const ScalarFn& f, double lo, double hi, double rel_tol)
{
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 300 && (b - a) > rel_tol * (std::abs(a) + std::abs(b)) + 1e-300; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc > fd ? Extremum{c, fc} : Extremum{d, fd};
}

Extremum scan_maximize(const ScalarFn& f, std::span<const double> samples)
{
    if (samples.empty())
        throw ParameterError("scan_maximize needs samples");
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double v = f(samples[i]);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    const double lo = samples[best == 0 ? 0 : best - 1];
    const double hi = samples[std::min(best + 1, samples.size() - 1)];
    Extremum refined = golden_section_maximize(f, lo, hi);
    if (refined.value < best_value)
        refined = {samples[best], best_value};
    return refined;
}

namespace {

double beta_continued_fraction(double a, double b, double x)
{
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps)
            return h;
    }
    throw AccuracyError("incomplete beta continued fraction did not converge");
}

} // namespace

double regularized_incomplete_beta(double a, double b, double x)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw ParameterError("incomplete beta needs positive shape parameters");
    if (x <= 0.0)
        return 0.0;
    if (x >= 1.0)
        return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x)
                             + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

std::vector<double> geomspace(double lo, double hi, std::size_t count)
{
    if (count == 0)
        return {};
    if (!(lo > 0.0) || !(hi > 0.0))
        throw ParameterError("geomspace needs positive bounds");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double llo = std::log(lo), lhi = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count)
{
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (std::size_t i = 0; i < count; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ParameterError("line fit needs two or more matching samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0)
        throw ParameterError("line fit needs distinct abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

} // namespace udiff::numerics
