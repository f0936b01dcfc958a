/**
 * @file spectral.hpp
 * @brief Generalized eigenpairs Kψ = λMψ of one channel, the positive ground
 *        state, and the discrete surrogate of accumulation at −∞.
 *
 * The graded grids make M⁻¹ᐟ²KM⁻¹ᐟ² enormous in norm (cells of size 10⁻⁹ next
 * to cells of size 1), so methods with absolute error ε‖T‖ lose the top of the
 * spectrum. Eigenvalues are therefore bracketed by Sturm counts of the pencil
 * μM − K itself, whose LDLᵀ pivots are relatively accurate; eigenvectors come
 * from twisted factorizations of the same pencil.
 */
#pragma once

#include "udiff/radial.hpp"

#include <string>
#include <vector>

namespace udiff {

struct SpectrumResult {
    std::vector<double> eigenvalues; ///< decreasing: λ₀ > λ₁ > …
    std::vector<Vector> eigenvectors; ///< M-orthonormal
    std::vector<double> residuals;    ///< ‖Kψ − λMψ‖_{M⁻¹}
    double orthogonality_defect = 0.0; ///< max |ψᵢᵀMψⱼ − δᵢⱼ|
    int ell = 0;
    std::string grid_ref;
};

/// Number of generalized eigenvalues strictly above mu.
std::size_t count_above(const DiscreteOperator& op, double mu);

/// The k largest eigenvalues only (no vectors), in decreasing order.
std::vector<double> top_eigenvalues(const DiscreteOperator& op, int k);

/**
 * The k largest eigenpairs. Throws ParameterError if k exceeds the grid size
 * and NumericError if the residual or orthonormality checks fail (tolerances
 * 10⁻⁸(|λ|+1) and 10⁻⁸).
 */
SpectrumResult solve_spectrum(const DiscreteOperator& op, int k);

struct GroundState {
    double lambda0 = 0.0;
    Vector psi; ///< strictly positive, M-norm 1
    double simplicity_gap = 0.0;
};

/**
 * Top eigenpair of an ℓ = 0 operator. The vector is obtained by inverse
 * iteration with σM − K for σ just above λ₀: an irreducible M-matrix, so every
 * iterate stays strictly positive. Throws DegeneracyError when λ₀ − λ₁ is
 * below 10⁻¹⁰|λ₀| and NumericError if a component is not positive.
 */
GroundState ground_state(const DiscreteOperator& op);

/// Number of strict sign changes along the vector, ignoring exact zeros.
int sign_changes(const Vector& v);

struct AccumulationReport {
    std::vector<double> gaps; ///< λ_k − λ_{k+1}
    bool strictly_decreasing = true;
    double min_gap = 0.0;
    bool gaps_nondecreasing = false;
    bool holds = false; ///< strictly decreasing and gaps bounded away from 0
    std::string note;
};

AccumulationReport accumulation_check(const SpectrumResult& spectrum);

} // namespace udiff
