/**
 * @file auxiliary.hpp
 * @brief Shen's critical-radius function m(x) for the potential Ṽ, the ball
 *        integrals it is built from, and reverse Hölder constant estimates.
 *
 * All potentials here are radial, so an integral over B(x, r) with |x| = s
 * reduces to a 1-D integral over the radius t of the sphere |y| = t, weighted
 * by the fraction of that sphere lying inside the ball.
 */
#pragma once

#include "udiff/operator_model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace udiff {

using RadialField = std::function<double(double)>;

struct BallIntegralSpec {
    double center_radius = 0.0; ///< s = |x|
    double radius = 1.0;        ///< r
    int quadrature_nodes = 32;  ///< starting Gauss–Legendre order per segment
};

/**
 * Fraction of the sphere {|y| = t} ⊂ ℝ^N inside B(x, r) with |x| = s. The
 * polar half-angle θ₀ = arccos((s²+t²−r²)/(2st)) bounds a cap whose relative
 * area is ½·I_{sin²θ₀}((N−1)/2, ½) (mirrored for θ₀ > π/2).
 */
double cap_fraction(int dimension, double s, double r, double t);

/// ∫_{B(x,r)} field(|y|) dy with node doubling until the relative change is
/// below 10⁻¹²; throws AccuracyError if it is still above 10⁻⁴.
double ball_integral_radial(int dimension, const RadialField& field, const BallIntegralSpec& spec);

/// Same integral at a fixed Gauss–Legendre order (no convergence check).
double ball_integral_fixed(int dimension, const RadialField& field, double s, double r, int order);

/// f_x(r) = r^{2−N} ∫_{B(x,r)} Ṽ(y) dy.
double critical_ratio(const OperatorParams& params, double s, double r);

struct MOptions {
    double scan_ratio = 1.001;
    double window_lo = 1e-6; ///< scan starts at window_lo·(1+s)
    double window_hi = 1e6;  ///< and ends at window_hi·(1+s)
    double bisection_rel_tol = 1e-10;
    int scan_order = 24;
};

/**
 * m(x) with |x| = s: 1/m = sup{r : f_x(r) ≤ 1}. The last sub-unit point of a
 * geometric scan brackets the supremum, which bisection then refines.
 * Throws RangeError if f never crosses 1 inside the scan window.
 */
double m_function(const OperatorParams& params, double s, const MOptions& options = {});

/// m(s) over a list of radii together with the fitted power law in (1+s).
struct MEstimate {
    std::vector<double> radii;
    std::vector<double> m_values;
    double fitted_exponent = 0.0;
    double fitted_constant = 0.0;
    double target_exponent = 0.0; ///< (β−α)/2
    bool success = false;          ///< fitted_exponent ≥ target − 0.1
};

/**
 * Least-squares slope of log m(s) against log(1+s). Needs at least four radii
 * spanning two decades (ParameterError otherwise).
 */
MEstimate fit_m_exponent(const OperatorParams& params, std::span<const double> radii,
                         const MOptions& options = {});

/// m at arbitrary s from a sampled profile: log–log interpolation, constant
/// extrapolation below the first radius, power-law extrapolation above the last.
double interpolate_m(const MEstimate& profile, double s);

struct RHConstantReport {
    double q_index = 0.0;          ///< +∞ selects the L^∞ form
    double constant_estimate = 0.0;
    std::size_t sample_count = 0;
    double worst_center_radius = 0.0;
    double worst_radius = 0.0;
};

/// Largest reverse Hölder ratio (q-mean over 1-mean) among the sampled balls.
RHConstantReport estimate_rh_constant(int dimension, const RadialField& field, double q_index,
                                      std::span<const double> centers, std::span<const double> radii);

/// The same for Ṽ of the operator.
RHConstantReport estimate_rh_constant(const OperatorParams& params, double q_index,
                                      std::span<const double> centers, std::span<const double> radii);

} // namespace udiff
