/**
 * @file numerics.hpp
 * @brief Small numerical helpers shared by the modules: quadrature, 1-D
 *        maximization, the regularized incomplete beta function, spacing.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace udiff::numerics {

using ScalarFn = std::function<double(double)>;

/// Adaptive Gauss–Kronrod on [a, b]. Throws AccuracyError when the error
/// estimate stays above rel_tol·|I| + abs_tol.
double integrate(const ScalarFn& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0);

/// Gauss–Legendre nodes and weights on [−1, 1] (cached per order).
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int order);

/// Gauss–Legendre rule on [a, b] after the substitution t = a + (b−a)(1−cos πu)/2,
/// which clusters nodes at both ends and tames algebraic endpoint behavior.
double integrate_clustered(const ScalarFn& f, double a, double b, int order);

struct Extremum {
    double x = 0.0;
    double value = 0.0;
};

/// Golden-section search for a maximum of f inside [lo, hi].
Extremum golden_section_maximize(const ScalarFn& f, double lo, double hi, double rel_tol = 1e-13);

/// Maximize over a sampled grid, then refine the best sample by golden section
/// between its neighbours.
Extremum scan_maximize(const ScalarFn& f, std::span<const double> samples);

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// count values geometrically spaced from lo to hi inclusive.
std::vector<double> geomspace(double lo, double hi, std::size_t count);

/// count values equally spaced from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// Least-squares line y ≈ slope·x + intercept.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace udiff::numerics
