/**
 * @file sector.hpp
 * @brief Dissipativity constants (c̃, ω, δ, θ_α) and resolvent-norm scans
 *        along rays of the left half-plane.
 */
#pragma once

#include "udiff/spectral.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace udiff {

/// α(N−2+α)/p: the coefficient of r^{α−2} before the shift.
double dissipativity_coefficient(const OperatorParams& params);

/**
 * ω = max(0, sup_r [K r^{α−2} − r^β]) with K = α(N−2+α)/p + c̃, evaluated in
 * closed form at r* = (K(α−2)/β)^{1/(β−α+2)}.
 */
double feasible_shift(const OperatorParams& params, double c_tilde);

/// The same supremum by a log-spaced scan plus golden-section refinement.
double feasible_shift_scan(const OperatorParams& params, double c_tilde);

struct SectorAngle {
    double delta = 0.0;
    double theta_alpha = 0.0;     ///< arctan δ, the literal "tan θ_α = δ"
    double theta_rotation = 0.0;  ///< arctan(1/δ), the rotation angle under the usual convention
};

/// δ = sqrt(|p−2|²/(4(p−1)) + α²/(4c̃)).
SectorAngle sector_angle(const OperatorParams& params, double c_tilde);

/// Minimizer of ω(c̃) + c̃ over a log grid on [10⁻², 10²].
double default_c_tilde(const OperatorParams& params);

/**
 * min over the radii of −c̃ r^{α−2} − (α(N−2+α)/p · r^{α−2} − r^β − ω); the
 * dissipativity inequality holds where this is ≥ 0.
 */
double dissipativity_slack(const OperatorParams& params, double c_tilde, double omega, std::span<const double> radii);

struct RayScan {
    double angle = 0.0;
    std::vector<double> moduli;
    std::vector<double> norms;    ///< ‖R(λ)‖ (p = 2 exact; otherwise sampled lower bounds)
    double sup_scaled = 0.0;      ///< max |λ|·‖R(λ)‖
    double bound = 0.0;           ///< 1/sin(π−φ)
    bool exact = true;            ///< false for sampled lower bounds
    bool holds = true;            ///< sup_scaled ≤ bound + 10⁻⁸ (exact scans only)
};

/**
 * Resolvent norms along rays λ = ρe^{iφ}. For p = 2 the norm in the weighted
 * space is max_k 1/|λ − λ_k| over the full discrete spectrum. For p ≠ 2,
 * sampled ratios ‖R(λ)f‖_p/‖f‖_p over seeded random radial f give lower bounds.
 * Throws SpectralProximityError if λ lies within 10⁻¹² of an eigenvalue.
 */
std::vector<RayScan> resolvent_norm_scan(const DiscreteOperator& op, std::span<const double> angles,
                                         std::span<const double> moduli, double p = 2.0, std::uint64_t seed = 0,
                                         int samples = 16);

struct SectorReport {
    double c_tilde = 0.0;
    double omega = 0.0;
    double omega_scan = 0.0;
    SectorAngle angle;
    double min_slack = 0.0;
    std::vector<RayScan> rays;
};

/// Everything above for one operator; c_tilde ≤ 0 selects default_c_tilde.
SectorReport analyze_sector(const OperatorParams& params, const DiscreteOperator& op, double c_tilde,
                            std::span<const double> angles, std::span<const double> moduli, std::uint64_t seed = 0);

} // namespace udiff
