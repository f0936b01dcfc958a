/**
 * @file semigroup.hpp
 * @brief Time stepping of M u̇ = K u and the semigroup diagnostics built on it:
 *        positivity, the domination T(t) ≤ S(t), the decay of T(t)𝟙, and the
 *        diagonal of the heat kernel from eigen-expansions.
 */
#pragma once

#include "udiff/spectral.hpp"

#include <span>
#include <string>
#include <vector>

namespace udiff {

struct EvolveOptions {
    /// Backward-Euler half-steps before Crank–Nicolson takes over. They damp
    /// the undershoot CN produces on rough data such as 𝟙 against a Dirichlet wall.
    int startup_half_steps = 4;
    /// Step halvings attempted when a nonnegative start loses positivity.
    int max_retries = 3;
};

struct EvolutionResult {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> mass_trace; ///< Σ M_i u_i = ∫ u dμ per recorded time
    double step = 0.0;              ///< nominal step finally used
    std::string scheme;
    int retries = 0;
    bool initial_nonnegative = false;
    bool positivity_ok = true;  ///< min u ≥ −10⁻¹²‖u0‖∞ at every recorded time
    double min_relative = 0.0;  ///< min over recorded states of min(u)/‖u0‖∞
};

/**
 * Evolve u0 to each of the increasing times. Inside every interval the step is
 * shrunk to the nearest divisor of the interval length so states land exactly
 * on the requested times. Throws ParameterError on bad times or step.
 */
EvolutionResult evolve(const DiscreteOperator& op, const Vector& u0, std::span<const double> times, double step,
                       const EvolveOptions& options = {});

struct DominationReport {
    std::vector<double> times;
    std::vector<double> max_excess; ///< max_i (u_T − u_S)_i / max u0 per time
    std::vector<double> worst_radius;
    bool holds = true; ///< every excess ≤ 10⁻¹⁰
};

/// Compares evolution under A (with Ṽ) and A₀ (without) from the same u0 ≥ 0.
DominationReport domination_check(const OperatorParams& params, const RadialGrid& grid, const Vector& u0,
                                  std::span<const double> times, double step, const EvolveOptions& options = {});

struct DecayOptions {
    double nodes_per_unit = 20.0; ///< interior nodes per unit of R
    double grading = 2.0;
    double step = 1e-3;
};

struct DecayProfile {
    double t = 0.0;
    std::vector<double> radii;
    std::vector<double> outer_max;       ///< sup_{r > R/2} u(t, r) per R
    std::vector<bool> monotone_in_r;     ///< u nonincreasing on r > R/2 per R
    std::vector<int> retries;
    bool decreasing_in_R = false;
    bool holds = false;
};

/// Evolves u0 ≡ 1 on [0, R] for each R and reports the outer-region maximum.
DecayProfile decay_of_one(const OperatorParams& params, double t, std::span<const double> radii,
                          const DecayOptions& options = {});

/// Multiplicity of the spherical harmonics of degree ℓ in dimension N.
double channel_degeneracy(int ell, int dimension);

struct KernelDiagnostics {
    double t = 0.0;
    double kernel_sup = 0.0;        ///< sup_x p(t, x, x) in the weighted measure
    double l1_to_linf_bound = 0.0;  ///< same value, read as ‖T(t)‖_{L¹(μ)→L^∞}
    double argmax_radius = 0.0;
    int channels = 0;
    double tail_bound = 0.0; ///< largest neglected e^{λt}
};

/**
 * Diagonal heat kernel from per-channel spectra (spectra[ℓ] for ℓ = 0..L, all
 * on the same grid). Throws AccuracyError unless every channel is complete or
 * ends with e^{λ t} < 10⁻¹², and the top channel starts below that threshold.
 */
KernelDiagnostics kernel_diagnostics(const std::vector<SpectrumResult>& spectra, const RadialGrid& grid, double t);

/// Per-channel spectra deep enough for kernel_diagnostics at time t.
std::vector<SpectrumResult> kernel_spectra(const OperatorParams& params, const RadialGrid& grid, double t,
                                           double tail = 1e-12, int max_channels = 64);

} // namespace udiff
