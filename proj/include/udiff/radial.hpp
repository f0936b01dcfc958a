/**
 * @file radial.hpp
 * @brief Graded radial grids and the finite-volume pair (K, M) of one angular
 *        channel.
 *
 * In channel ℓ the eigenproblem A u = λu reads
 *   (r^{N−1}u′)′ − r^{N−1}(Ṽ + ℓ(ℓ+N−2)/r²)u = λ (r^{N−1}/a) u,
 * which is symmetric in the measure r^{N−1}dr/a. K collects the fluxes and
 * the potential, M is the lumped weighted mass.
 */
#pragma once

#include "udiff/operator_model.hpp"
#include "udiff/tridiagonal.hpp"

#include <string>
#include <vector>

namespace udiff {

enum class InnerBoundary { ZeroFlux, Dirichlet };
enum class OuterBoundary { Dirichlet, ZeroFlux };

/// Nodes r_i = R·(i/(n+1))^grading, i = 1..n, on [0, R] in dimension N.
struct RadialGrid {
    int dimension = 3;
    double R = 1.0;
    double grading = 1.0;
    std::vector<double> nodes;
    /// ∫ r^{N−1} dr over the n+1 intervals between 0, the nodes and R.
    std::vector<double> cell_volumes;

    std::size_t size() const { return nodes.size(); }
    double max_cell_width() const;
    std::string describe() const;

    /// Lower/upper faces of the control volume around node i.
    double lower_face(std::size_t i, InnerBoundary inner = InnerBoundary::ZeroFlux) const;
    double upper_face(std::size_t i, OuterBoundary outer = OuterBoundary::Dirichlet) const;

    /// σ_{N−1}∫ r^{N−1} dr over each control volume: the Lebesgue weights of
    /// discrete L^p norms on ℝ^N.
    Vector lebesgue_weights(InnerBoundary inner = InnerBoundary::ZeroFlux,
                            OuterBoundary outer = OuterBoundary::Dirichlet) const;
};

RadialGrid build_grid(int dimension, double R, int n, double grading);

struct DiscreteOperator {
    RadialGrid grid;
    RadialModel model;
    int ell = 0;
    bool include_potential = true;
    InnerBoundary inner = InnerBoundary::ZeroFlux;
    OuterBoundary outer = OuterBoundary::Dirichlet;
    SymTridiagonal K; ///< flux + potential, negative semidefinite
    Vector M;         ///< lumped ∫ r^{N−1}/a over control volumes

    Eigen::Index size() const { return M.size(); }
};

struct AssemblyOptions {
    OuterBoundary outer = OuterBoundary::Dirichlet;
};

/**
 * Finite-volume assembly. Face fluxes use the exact radial harmonic
 * coefficient 1/∫ t^{1−N} dt, so r^{2−N} is reproduced nodally; the inner
 * face is zero-flux for ℓ = 0 and Dirichlet for ℓ ≥ 1. The centrifugal term
 * belongs to the Laplacian and is always present; include_potential toggles Ṽ.
 */
DiscreteOperator assemble_operator(const RadialGrid& grid, const RadialModel& model, int ell, bool include_potential,
                                   AssemblyOptions options = {});

DiscreteOperator assemble_operator(const RadialGrid& grid, const OperatorParams& params, int ell,
                                   bool include_potential);

/// M⁻¹K u: the discrete action of A (or of A₀ without potential).
Vector apply_operator(const DiscreteOperator& op, const Vector& u);

} // namespace udiff
