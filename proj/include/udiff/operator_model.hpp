/**
 * @file operator_model.hpp
 * @brief Parameters and closed-form coefficients of A = (1+|x|^α)Δ − |x|^β on ℝ^N.
 */
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace udiff {

/// Surface area σ_{N−1} = 2π^{N/2}/Γ(N/2) of the unit sphere in ℝ^N.
double sphere_area(int dimension);

/// Volume of a ball of radius r in ℝ^N.
double ball_volume(int dimension, double radius);

/**
 * The quadruple (N, α, β, p). Construction enforces N ≥ 3, α > 2, β > α − 2
 * and 1 < p < ∞; every coefficient of the operator derives from it.
 */
class OperatorParams {
public:
    OperatorParams(int dimension, double alpha, double beta, double p = 2.0);

    int dimension() const { return dimension_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double p() const { return p_; }
    double sphere_area() const { return sphere_area_; }

    OperatorParams with_beta(double beta) const { return {dimension_, alpha_, beta, p_}; }
    OperatorParams with_p(double p) const { return {dimension_, alpha_, beta_, p}; }

    /// "N=3 alpha=3 beta=2 p=2"
    std::string label() const;

    friend bool operator==(const OperatorParams&, const OperatorParams&) = default;

private:
    int dimension_;
    double alpha_;
    double beta_;
    double p_;
    double sphere_area_;
};

/// Values of the four coefficient maps at one radius.
struct CoefficientValues {
    double a;      ///< 1 + r^α
    double V;      ///< r^β
    double Vtilde; ///< V·q
    double q;      ///< 1/(1 + r^α)
};

/// Closed-form coefficients at radius r ≥ 0. Throws DomainError for r < 0.
CoefficientValues eval_coefficients(const OperatorParams& params, double r);

/**
 * Radial coefficient model used by the discretization. Besides the operator
 * family itself it expresses the validation modes: unit diffusion (a ≡ 1),
 * a switched-off potential, or a harmonic potential r².
 */
struct RadialModel {
    int dimension = 3;
    std::optional<double> diffusion_exponent; ///< a = 1 + r^α; a ≡ 1 when empty
    double potential_exponent = 0.0;
    double potential_scale = 1.0; ///< V = scale · r^β; 0 disables the potential

    double a(double r) const;
    double V(double r) const;
    double vtilde(double r) const { return V(r) / a(r); }
    double sphere_area() const { return udiff::sphere_area(dimension); }

    RadialModel without_potential() const;

    static RadialModel of(const OperatorParams& params);
    /// a ≡ 1, V = r²: the harmonic oscillator −Δ + r² (validation only).
    static RadialModel harmonic(int dimension);
    /// a ≡ 1, V ≡ 0: the plain Laplacian (validation only).
    static RadialModel laplacian(int dimension);
};

/// Constant C ≥ 0 with Aφ ≤ Cφ for φ = 1 + r^γ, and where the ratio peaks.
struct LyapunovProbe {
    double gamma = 0.0;
    double C = 0.0;
    double r_star = 0.0;
};

/// Aφ(r) = γ(N+γ−2)(1+r^α)r^{γ−2} − (1+r^γ)r^β.
double lyapunov_generator(const OperatorParams& params, double gamma, double r);

/// Aφ(r)/φ(r).
double lyapunov_ratio(const OperatorParams& params, double gamma, double r);

/**
 * C = max(0, sup_{r>0} Aφ/φ). The supremum is located by a log-spaced scan
 * of (0, 10³] followed by golden-section refinement; the ratio must already be
 * negative at the right end of the window. Throws ParameterError for γ ≤ 2.
 */
LyapunovProbe lyapunov_constant(const OperatorParams& params, double gamma);

/// One line of the reverse Hölder membership table for Ṽ.
struct ReverseHolderVerdict {
    std::string label;
    double q = 0.0; ///< +∞ for B_∞
    bool holds = false;
    std::string reason;
};

/**
 * Membership verdicts for B_∞, B_q (each q in q_values), B_{N/2} and B_N.
 * The conditions are sufficient only, so a failed test reads "not implied".
 */
std::vector<ReverseHolderVerdict> classify_reverse_holder(const OperatorParams& params,
                                                          std::span<const double> q_values = {});

} // namespace udiff
