/**
 * @file green.hpp
 * @brief Radial Green function of Δ − Ṽ with pole at the origin, decay
 *        constants against m(x), resolvent solves and the weighted a-priori
 *        estimate report.
 */
#pragma once

#include "udiff/auxiliary.hpp"
#include "udiff/spectral.hpp"

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace udiff {

struct GreenSolution {
    std::string grid_ref;
    RadialGrid grid;
    Vector G0; ///< G(r_i, 0)
    /// |σ·(flux through the first face) − 1|: the share of the unit load
    /// absorbed by the potential inside the first control volume.
    double flux_normalization_residual = 0.0;
    /// max |G·r^{N−2}(N−2)σ − 1| over nodes in [r₁, 10r₁].
    double near_origin_deviation = 0.0;
    std::map<int, double> fitted_Ck;
};

/**
 * Solves −K G = e₁/σ: a unit point load in the origin cell for the operator
 * Δ − Ṽ (no diffusion weight), Dirichlet at R. Requires grading ≥ 2.
 */
GreenSolution green_at_origin(const OperatorParams& params, const RadialGrid& grid);

/// Same solve for an arbitrary radial model, e.g. the potential-free Laplacian.
GreenSolution green_at_origin(const RadialModel& model, const RadialGrid& grid);

struct GreenBoundRow {
    int k = 0;
    double C_k = 0.0;
    double argmax_radius = 0.0;
};

/// C_k = max_i G(r_i)(1 + m(r_i) r_i)^k r_i^{N−2}; stores the values in gs.
std::vector<GreenBoundRow> verify_green_bound(GreenSolution& gs, const MEstimate& m_profile,
                                              std::span<const int> k_list);

/**
 * Solves (λM − K)u = Mf, i.e. u = (λ − A)⁻¹f. Real λ ≥ 0 uses the M-matrix
 * factorization; any other λ uses pivoted elimination after checking that it
 * is not within 10⁻¹²·max(1, |λ|) of an eigenvalue (SpectralProximityError).
 */
Vector solve_resolvent(const DiscreteOperator& op, double lambda, const Vector& f);
ComplexVector solve_resolvent(const DiscreteOperator& op, std::complex<double> lambda, const ComplexVector& f);

/// Test profiles for the weighted estimates, by name: gauss@0, gauss@3,
/// gauss@6, oscillatory, plateau.
double weighted_profile(const std::string& name, double r);
std::vector<std::string> default_profile_family();

struct WeightedEstimateSpec {
    std::vector<double> gammas;  ///< each in [0, β]
    double p = 2.0;
    std::vector<std::string> f_family = default_profile_family();
    std::vector<double> domains{20.0, 40.0};
    double nodes_per_unit = 20.0;
    double grading = 2.0;
};

/// Discrete L^p norm on ℝ^N of a radial vector, with Lebesgue cell weights.
double radial_lp_norm(const Vector& values, const Vector& weights, double p);

/// Centred differences inside, one-sided at both ends.
Vector radial_derivative(const RadialGrid& grid, const Vector& u);

struct EstimateRow {
    std::string estimate;           ///< e.g. "|x|^1.5 u / f"
    std::vector<double> sup_ratio;  ///< per domain
    std::vector<std::string> worst_profile;
    double max_growth = 0.0;        ///< largest relative increase between consecutive domains
    bool bounded = false;           ///< max_growth < 0.1
};

struct WeightedEstimateReport {
    double p = 2.0;
    std::vector<double> domains;
    std::vector<EstimateRow> rows;
    /// p = 2 only: max over the family of |λ₀|·‖u‖/‖f‖ in the weighted measure,
    /// where A is self-adjoint and the bound is 1.
    std::vector<double> spectral_bound_ratio;
    bool all_bounded = false;
};

WeightedEstimateReport weighted_estimate_report(const OperatorParams& params, const WeightedEstimateSpec& spec);

} // namespace udiff
