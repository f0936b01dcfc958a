#include "udiff/semigroup.hpp"

#include "udiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace udiff {
namespace {

struct Stepper {
    const DiscreteOperator& op;
    double h = 0.0;
    MMatrixFactor cn; // M − (h/2)K
    MMatrixFactor be; // M − (h/2)K as well: a BE half-step of size h/2

    Stepper(const DiscreteOperator& o, double step) : op(o), h(step)
    {
        const Vector diag = op.M - 0.5 * h * op.K.diag;
        const Vector off = -0.5 * h * op.K.off;
        cn = MMatrixFactor(diag, off);
        be = cn;
    }

    void crank_nicolson(Vector& u) const
    {
        u = cn.solve(op.M.cwiseProduct(u) + 0.5 * h * op.K.multiply(u));
    }

    void euler_half(Vector& u) const { u = be.solve(op.M.cwiseProduct(u)); }
};

EvolutionResult evolve_once(const DiscreteOperator& op, const Vector& u0, std::span<const double> times, double step,
                            int startup_half_steps)
{
    EvolutionResult result;
    result.step = step;
    result.scheme = "crank-nicolson h=" + std::to_string(step) + " with " + std::to_string(startup_half_steps) +
                    " backward-euler half-steps";
    Vector u = u0;
    double now = 0.0;
    int startup_left = startup_half_steps;
    for (double target : times) {
        const double length = target - now;
        if (length > 0.0) {
            const auto count = static_cast<long>(std::ceil(length / step * (1.0 - 1e-12)));
            const Stepper stepper(op, length / static_cast<double>(count));
            long halves = 2 * count;
            while (halves > 0) {
                if (startup_left > 0 || halves == 1) {
                    stepper.euler_half(u);
                    --halves;
                    startup_left = std::max(0, startup_left - 1);
                } else {
                    stepper.crank_nicolson(u);
                    halves -= 2;
                }
            }
        }
        now = target;
        result.times.push_back(target);
        result.mass_trace.push_back(op.M.dot(u));
        result.states.push_back(u);
    }
    return result;
}

void judge_positivity(EvolutionResult& result, const Vector& u0)
{
    const double scale = u0.cwiseAbs().maxCoeff();
    result.initial_nonnegative = u0.minCoeff() >= 0.0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& s : result.states)
        worst = std::min(worst, s.minCoeff());
    result.min_relative = scale > 0.0 ? worst / scale : 0.0;
    result.positivity_ok = !result.initial_nonnegative || scale == 0.0 || result.min_relative >= -1e-12;
}

} // namespace

EvolutionResult evolve(const DiscreteOperator& op, const Vector& u0, std::span<const double> times, double step,
                       const EvolveOptions& options)
{
    if (u0.size() != op.size())
        throw DimensionError("evolve: initial vector length differs from the grid");
    if (!(step > 0.0) || !std::isfinite(step))
        throw ParameterError("evolve: step must be positive");
    double previous = 0.0;
    for (double t : times) {
        if (!(t >= previous) || !std::isfinite(t))
            throw ParameterError("evolve: times must be nonnegative and increasing");
        previous = t;
    }

    double h = step;
    EvolutionResult result;
    for (int attempt = 0;; ++attempt) {
        result = evolve_once(op, u0, times, h, options.startup_half_steps);
        result.retries = attempt;
        judge_positivity(result, u0);
        if (result.positivity_ok || attempt >= options.max_retries)
            return result;
        h *= 0.5;
    }
}

DominationReport domination_check(const OperatorParams& params, const RadialGrid& grid, const Vector& u0,
                                  std::span<const double> times, double step, const EvolveOptions& options)
{
    if (u0.minCoeff() < 0.0)
        throw ParameterError("domination_check: initial data must be nonnegative");
    const auto with = assemble_operator(grid, params, 0, true);
    const auto without = assemble_operator(grid, params, 0, false);
    const auto uT = evolve(with, u0, times, step, options);
    const auto uS = evolve(without, u0, times, step, options);
    const double scale = u0.maxCoeff();

    DominationReport report;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const Vector excess = uT.states[j] - uS.states[j];
        Eigen::Index where = 0;
        const double worst = excess.maxCoeff(&where);
        report.times.push_back(times[j]);
        report.max_excess.push_back(scale > 0.0 ? worst / scale : worst);
        report.worst_radius.push_back(grid.nodes[static_cast<std::size_t>(where)]);
        if (report.max_excess.back() > 1e-10)
            report.holds = false;
    }
    return report;
}

DecayProfile decay_of_one(const OperatorParams& params, double t, std::span<const double> radii,
                          const DecayOptions& options)
{
    if (!(t > 0.0))
        throw ParameterError("decay_of_one: t must be positive");
    DecayProfile profile;
    profile.t = t;
    const double times[] = {t};
    for (double R : radii) {
        const int n = std::max(16, static_cast<int>(std::lround(options.nodes_per_unit * R)));
        const auto grid = build_grid(params.dimension(), R, n, options.grading);
        const auto op = assemble_operator(grid, params, 0, true);
        const auto run = evolve(op, Vector::Ones(n), times, options.step);
        const Vector& u = run.states.front();
        double outer = 0.0;
        bool monotone = true;
        double last = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (grid.nodes[static_cast<std::size_t>(i)] <= 0.5 * R)
                continue;
            outer = std::max(outer, u[i]);
            if (u[i] > last * (1.0 + 1e-12) + 1e-300)
                monotone = false;
            last = u[i];
        }
        profile.radii.push_back(R);
        profile.outer_max.push_back(outer);
        profile.monotone_in_r.push_back(monotone);
        profile.retries.push_back(run.retries);
    }
    profile.decreasing_in_R = true;
    for (std::size_t i = 1; i < profile.outer_max.size(); ++i)
        if (!(profile.outer_max[i] < profile.outer_max[i - 1]))
            profile.decreasing_in_R = false;
    profile.holds = profile.decreasing_in_R &&
                    std::all_of(profile.monotone_in_r.begin(), profile.monotone_in_r.end(), [](bool b) { return b; });
    return profile;
}

double channel_degeneracy(int ell, int dimension)
{
    if (ell < 0 || dimension < 2)
        throw ParameterError("channel_degeneracy: need ell >= 0 and N >= 2");
    if (ell == 0)
        return 1.0;
    // (2ℓ+N−2)(ℓ+N−3)! / (ℓ!(N−2)!)
    double binom = 1.0; // C(ℓ+N−3, ℓ)
    for (int j = 1; j <= ell; ++j)
        binom = binom * (dimension - 3 + j) / j;
    return (2.0 * ell + dimension - 2.0) * binom / (dimension - 2.0);
}

KernelDiagnostics kernel_diagnostics(const std::vector<SpectrumResult>& spectra, const RadialGrid& grid, double t)
{
    if (!(t > 0.0))
        throw ParameterError("kernel_diagnostics: t must be positive");
    if (spectra.empty())
        throw ParameterError("kernel_diagnostics: no channels");
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double sigma = sphere_area(grid.dimension);
    KernelDiagnostics kd;
    kd.t = t;
    kd.channels = static_cast<int>(spectra.size());

    Vector diag = Vector::Zero(n);
    for (std::size_t ell = 0; ell < spectra.size(); ++ell) {
        const auto& s = spectra[ell];
        if (s.ell != static_cast<int>(ell))
            throw ParameterError("kernel_diagnostics: spectra must be ordered by channel starting at 0");
        const double weight = channel_degeneracy(static_cast<int>(ell), grid.dimension) / sigma;
        for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
            if (s.eigenvectors[k].size() != n)
                throw DimensionError("kernel_diagnostics: eigenvector length differs from the grid");
            diag += weight * std::exp(s.eigenvalues[k] * t) * s.eigenvectors[k].cwiseAbs2();
        }
        const bool complete = static_cast<Eigen::Index>(s.eigenvalues.size()) == n;
        if (!complete)
            kd.tail_bound = std::max(kd.tail_bound, std::exp(s.eigenvalues.back() * t));
    }
    kd.tail_bound = std::max(kd.tail_bound, std::exp(spectra.back().eigenvalues.front() * t));
    if (!(kd.tail_bound < 1e-12))
        throw AccuracyError("kernel_diagnostics: truncated tail e^{lambda t} = " + std::to_string(kd.tail_bound) +
                            " exceeds 1e-12; add eigenpairs or channels");
    Eigen::Index where = 0;
    kd.kernel_sup = diag.maxCoeff(&where);
    kd.l1_to_linf_bound = kd.kernel_sup;
    kd.argmax_radius = grid.nodes[static_cast<std::size_t>(where)];
    return kd;
}

std::vector<SpectrumResult> kernel_spectra(const OperatorParams& params, const RadialGrid& grid, double t,
                                           double tail, int max_channels)
{
    const int n = static_cast<int>(grid.size());
    // Eigenvalues below this level contribute less than the tail threshold.
    const double floor = std::log(tail) / t;
    std::vector<SpectrumResult> out;
    for (int ell = 0; ell < max_channels; ++ell) {
        const auto op = assemble_operator(grid, params, ell, true);
        const double top = solve_spectrum(op, 1).eigenvalues.front();
        const auto above = static_cast<int>(count_above(op, floor * 1.0001));
        const int k = std::clamp(above + 1, 1, n);
        out.push_back(solve_spectrum(op, k));
        if (top < floor * 1.0001)
            return out;
    }
    throw AccuracyError("kernel_spectra: channel ground levels stay above the tail threshold");
}

} // namespace udiff
