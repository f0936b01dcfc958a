#include "bundle.hpp"

#include "udiff/auxiliary.hpp"
#include "udiff/error.hpp"
#include "udiff/experiment.hpp"
#include "udiff/green.hpp"
#include "udiff/numerics.hpp"
#include "udiff/radial.hpp"
#include "udiff/sector.hpp"
#include "udiff/semigroup.hpp"
#include "udiff/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace udiff {
namespace {

using bundle::CsvTable;
using Clock = std::chrono::steady_clock;

struct SuiteOutput {
    std::vector<ClaimResult> claims;
    std::vector<std::pair<std::string, CsvTable>> tables;
};

struct Outcome {
    bool ok = false;
    std::string summary;
};

std::string fmt(double v, int digits = 4)
{
    char buffer[48];
    std::snprintf(buffer, sizeof buffer, "%.*g", digits, v);
    return buffer;
}

ClaimResult evaluate(std::string id, std::string suite, std::string anchor, std::vector<std::string> evidence,
                     bool surrogate, const std::function<Outcome()>& body)
{
    ClaimResult claim;
    claim.id = std::move(id);
    claim.suite = std::move(suite);
    claim.anchor = std::move(anchor);
    claim.evidence = std::move(evidence);
    const auto start = Clock::now();
    try {
        const Outcome outcome = body();
        claim.verdict = outcome.ok ? (surrogate ? Verdict::BoundedSurrogate : Verdict::Pass) : Verdict::Fail;
        claim.summary = outcome.summary;
    } catch (const std::exception& e) {
        claim.verdict = Verdict::Fail;
        claim.summary = std::string("error: ") + e.what();
    }
    claim.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return claim;
}

std::vector<std::string> param_columns(std::vector<std::string> rest)
{
    std::vector<std::string> header{"N", "alpha", "beta", "p"};
    header.insert(header.end(), rest.begin(), rest.end());
    return header;
}

CsvTable& add_params(CsvTable& table, const OperatorParams& P)
{
    return table.row().add(P.dimension()).add(P.alpha()).add(P.beta()).add(P.p());
}

std::string short_label(const OperatorParams& P)
{
    return "(" + std::to_string(P.dimension()) + "," + fmt(P.alpha()) + "," + fmt(P.beta()) + ")";
}

double relative_difference(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

RadialGrid config_grid(const ExperimentConfig& config, int N, double R_scale = 1.0, int n_scale = 1)
{
    return build_grid(N, config.grid.R * R_scale, config.grid.n * n_scale, config.grid.grading);
}

// ---------------------------------------------------------------- lyapunov

double uniform_scan_lyapunov(const OperatorParams& P, double gamma)
{
    const auto ratio = [&](double r) { return lyapunov_ratio(P, gamma, r); };
    constexpr int count = 200000;
    constexpr double top = 1e3;
    const double h = top / count;
    int best = 1;
    double best_value = ratio(h);
    for (int k = 2; k <= count; ++k) {
        const double v = ratio(h * k);
        if (v > best_value) {
            best_value = v;
            best = k;
        }
    }
    const double lo = best > 1 ? h * (best - 1) : 0.5 * h;
    const double hi = std::min(top, h * (best + 1));
    const auto refined = numerics::golden_section_maximize(ratio, lo, hi);
    return std::max(0.0, std::max(best_value, refined.value));
}

SuiteOutput run_lyapunov(const ExperimentConfig& config)
{
    SuiteOutput out;
    CsvTable table(param_columns({"gamma", "C", "r_star", "C_scan", "rel_diff", "max_excess", "ok"}));
    out.claims.push_back(evaluate(
        "C1", "lyapunov", "Lyapunov bound A(1+r^g) <= C(1+r^g)", {"lyapunov.csv"}, false, [&] {
            const auto grid = numerics::geomspace(1e-4, 1e3, 10000);
            bool ok = true;
            double worst_rel = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
            int cases = 0;
            for (const auto& P : config.params)
                for (double gamma : {2.5, 3.0, 4.0}) {
                    ++cases;
                    const auto probe = lyapunov_constant(P, gamma);
                    const double scanned = uniform_scan_lyapunov(P, gamma);
                    double excess = -std::numeric_limits<double>::infinity();
                    for (double r : grid)
                        excess = std::max(excess, lyapunov_ratio(P, gamma, r) - probe.C);
                    const double rel = relative_difference(probe.C, scanned);
                    const bool row_ok = rel <= config.tol("lyapunov_oracle") && excess <= config.tol("lyapunov_bound");
                    ok = ok && row_ok;
                    worst_rel = std::max(worst_rel, rel);
                    worst_excess = std::max(worst_excess, excess);
                    add_params(table, P).add(gamma).add(probe.C).add(probe.r_star).add(scanned).add(rel).add(excess).add(
                        row_ok);
                }
            return Outcome{ok, std::to_string(cases) + " cases; max rel |C - C_scan| = " + fmt(worst_rel)
                                   + "; max (A phi - C phi)/phi = " + fmt(worst_excess)};
        }));
    out.tables.emplace_back("lyapunov.csv", std::move(table));
    return out;
}

// ---------------------------------------------------------------- m function

// r^{2−N} ∫_{B(x,r)} Ṽ with |x| = s by adaptive Gauss–Kronrod over shells.
double shell_ratio(const OperatorParams& P, double s, double r, double rel_tol)
{
    const int N = P.dimension();
    const auto density = [&](double t) { return std::pow(t, N - 1) * eval_coefficients(P, t).Vtilde; };
    double total = 0.0;
    if (s < r)
        total += numerics::integrate(density, 0.0, r - s, rel_tol);
    if (s > 0.0)
        total += numerics::integrate([&](double t) { return density(t) * cap_fraction(N, s, r, t); }, std::abs(s - r),
                                     s + r, rel_tol);
    return P.sphere_area() * total * std::pow(r, 2.0 - N);
}

// Forward scan for the last crossing at ratio 1.01, then a ratio-1.0001 scan
// inside the bracket, then bisection.
double dense_scan_m(const OperatorParams& P, double s)
{
    const double lo = 1e-6 * (1.0 + s), hi = 1e6 * (1.0 + s);
    const auto coarse = [&](double r) { return shell_ratio(P, s, r, 1e-7); };
    const auto fine = [&](double r) { return shell_ratio(P, s, r, 1e-12); };

    double last_below = -1.0;
    for (double r = lo; r <= hi; r *= 1.01)
        if (coarse(r) <= 1.0)
            last_below = r;
    if (last_below < 0.0)
        throw RangeError("dense scan: f_x(r) never drops to 1");

    double a = last_below / 1.01, b = last_below * 1.0201;
    double last = -1.0;
    for (double r = a; r <= b; r *= 1.0001)
        if (fine(r) <= 1.0)
            last = r;
    if (last < 0.0)
        throw RangeError("dense scan: refinement lost the crossing");
    a = last;
    b = last * 1.0001;
    while (b - a > 1e-13 * a) {
        const double mid = 0.5 * (a + b);
        (fine(mid) <= 1.0 ? a : b) = mid;
    }
    return 1.0 / (0.5 * (a + b));
}

SuiteOutput run_mfunction(const ExperimentConfig& config)
{
    SuiteOutput out;
    CsvTable slopes(param_columns({"fitted_exponent", "target_exponent", "deviation", "ok"}));
    CsvTable profile(param_columns({"s", "m"}));
    out.claims.push_back(evaluate(
        "C2", "mfunction", "growth exponent of m: (1+|x|)^((b-a)/2)", {"m_exponent.csv", "m_profile.csv"}, false,
        [&] {
            const auto radii = numerics::geomspace(10.0, 1e3, 9);
            bool ok = true;
            std::string numbers;
            for (const auto& P : config.params) {
                const auto est = fit_m_exponent(P, radii);
                const double dev = std::abs(est.fitted_exponent - est.target_exponent);
                const bool row_ok = dev <= config.tol("m_slope");
                ok = ok && row_ok;
                add_params(slopes, P).add(est.fitted_exponent).add(est.target_exponent).add(dev).add(row_ok);
                for (std::size_t i = 0; i < est.radii.size(); ++i)
                    add_params(profile, P).add(est.radii[i]).add(est.m_values[i]);
                numbers += (numbers.empty() ? "" : "; ") + short_label(P) + " slope " + fmt(est.fitted_exponent)
                           + " vs " + fmt(est.target_exponent);
            }
            return Outcome{ok, numbers};
        }));

    CsvTable oracle(param_columns({"s", "m_bisection", "m_dense_scan", "rel_diff", "ok"}));
    out.claims.push_back(evaluate(
        "C3", "mfunction", "m(x) = 1/sup{r : r^(2-N) int_B(x,r) V~ <= 1}", {"m_oracle.csv"}, false, [&] {
            const std::vector<double> radii{0.0, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0};
            bool ok = true;
            double worst = 0.0;
            for (const auto& P : config.params)
                for (double s : radii) {
                    const double m = m_function(P, s);
                    const double m_dense = dense_scan_m(P, s);
                    const double rel = relative_difference(m, m_dense);
                    const bool row_ok = rel <= config.tol("m_oracle");
                    ok = ok && row_ok;
                    worst = std::max(worst, rel);
                    add_params(oracle, P).add(s).add(m).add(m_dense).add(rel).add(row_ok);
                }
            return Outcome{ok, std::to_string(radii.size() * config.params.size())
                                   + " radii; max rel |m - m_dense| = " + fmt(worst)};
        }));
    out.tables.emplace_back("m_exponent.csv", std::move(slopes));
    out.tables.emplace_back("m_profile.csv", std::move(profile));
    out.tables.emplace_back("m_oracle.csv", std::move(oracle));
    return out;
}

// ---------------------------------------------------------------- reverse Hölder

SuiteOutput run_rholder(const ExperimentConfig& config)
{
    SuiteOutput out;
    CsvTable table({"kind", "N", "alpha", "beta", "q", "coarse", "fine", "growth", "ok"});
    out.claims.push_back(evaluate(
        "C4", "rholder", "reverse Hoelder class of V~", {"rholder.csv"}, true, [&] {
            bool ok = true;
            double constant_dev = 0.0;
            std::set<int> dims;
            for (const auto& P : config.params)
                dims.insert(P.dimension());
            const std::vector<double> centers{0.0, 1.0, 10.0, 100.0};
            const std::vector<double> radii{0.01, 1.0, 100.0};
            for (int N : dims)
                for (double q : {1.5, 0.5 * N, std::numeric_limits<double>::infinity()}) {
                    double dev = 0.0;
                    for (double s : centers)
                        for (double r : radii) {
                            const std::vector<double> c{s}, rr{r};
                            const auto one = estimate_rh_constant(N, [](double) { return 2.5; }, q, c, rr);
                            dev = std::max(dev, std::abs(one.constant_estimate - 1.0));
                        }
                    const bool row_ok = dev <= config.tol("rh_constant");
                    ok = ok && row_ok;
                    constant_dev = std::max(constant_dev, dev);
                    table.row().add("constant").add(N).add(0.0).add(0.0).add(q).add(1.0 + dev).add(1.0 + dev).add(
                        dev).add(row_ok);
                }

            std::string numbers = "constant field |ratio - 1| <= " + fmt(constant_dev);
            int sampled = 0;
            auto coarse_c = numerics::geomspace(1e-2, 1e3, 12);
            auto fine_c = numerics::geomspace(1e-2, 1e3, 120);
            coarse_c.insert(coarse_c.begin(), 0.0);
            fine_c.insert(fine_c.begin(), 0.0);
            const auto coarse_r = numerics::geomspace(1e-2, 1e3, 12);
            const auto fine_r = numerics::geomspace(1e-2, 1e3, 120);
            for (const auto& P : config.params) {
                const std::vector<double> qs{1.5};
                const auto verdicts = classify_reverse_holder(P, qs);
                const auto it = std::find_if(verdicts.begin(), verdicts.end(),
                                             [](const ReverseHolderVerdict& v) { return v.q == 1.5; });
                if (it == verdicts.end() || !it->holds) {
                    table.row().add("not implied").add(P.dimension()).add(P.alpha()).add(P.beta()).add(1.5).add(
                        std::nan("")).add(std::nan("")).add(std::nan("")).add(true);
                    continue;
                }
                const auto coarse = estimate_rh_constant(P, 1.5, coarse_c, coarse_r);
                const auto fine = estimate_rh_constant(P, 1.5, fine_c, fine_r);
                const double growth = fine.constant_estimate / coarse.constant_estimate - 1.0;
                const bool row_ok = growth < config.tol("rh_growth") && coarse.constant_estimate >= 1.0 - 1e-9;
                ok = ok && row_ok;
                ++sampled;
                table.row().add("sampled").add(P.dimension()).add(P.alpha()).add(P.beta()).add(1.5).add(
                    coarse.constant_estimate).add(fine.constant_estimate).add(growth).add(row_ok);
                numbers += "; " + short_label(P) + " q=3/2 " + fmt(coarse.constant_estimate) + " -> "
                           + fmt(fine.constant_estimate);
            }
            if (sampled == 0)
                numbers += "; no parameter set implies B_{3/2}";
            return Outcome{ok, numbers};
        }));
    out.tables.emplace_back("rholder.csv", std::move(table));
    return out;
}

// ---------------------------------------------------------------- spectrum

Eigen::VectorXd dense_top_eigenvalues(const DiscreteOperator& op, int k)
{
    const Eigen::Index n = op.size();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    K.diagonal() = op.K.diag;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        K(i, i + 1) = K(i + 1, i) = op.K.off[i];
    const Eigen::MatrixXd M = op.M.asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, M, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError("dense generalized eigensolver failed");
    return solver.eigenvalues().reverse().head(k);
}

SuiteOutput run_spectrum(const ExperimentConfig& config)
{
    SuiteOutput out;
    CsvTable eigen(param_columns({"R", "n", "k", "eigenvalue", "residual"}));
    CsvTable ground(param_columns({"lambda0", "min_psi", "sign_changes", "simplicity_gap", "orthogonality_defect",
                                   "gaps_strictly_decreasing", "min_gap"}));
    CsvTable dense(param_columns({"ell", "k", "eigenvalue", "dense_eigenvalue", "rel_diff"}));
    CsvTable harmonic({"N", "R", "n", "lambda0", "exact", "abs_error"});
    out.claims.push_back(evaluate(
        "C5", "spectrum", "negative simple spectrum, positive ground state",
        {"spectrum.csv", "ground_state.csv", "dense_oracle.csv", "harmonic.csv"}, false, [&] {
            bool ok = true;
            double max_eigenvalue = -std::numeric_limits<double>::infinity(), min_psi = 1.0, dense_dev = 0.0;
            for (const auto& P : config.params) {
                const auto grid = config_grid(config, P.dimension());
                const auto op = assemble_operator(grid, P, 0, true);
                const auto spec = solve_spectrum(op, 10);
                const auto gs = ground_state(op);
                const auto acc = accumulation_check(spec);
                for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
                    add_params(eigen, P).add(grid.R).add(static_cast<int>(grid.size())).add(static_cast<int>(k)).add(
                        spec.eigenvalues[k]).add(spec.residuals[k]);
                    max_eigenvalue = std::max(max_eigenvalue, spec.eigenvalues[k]);
                    ok = ok && spec.eigenvalues[k] < 0.0;
                }
                const double psi_min = gs.psi.minCoeff() / gs.psi.maxCoeff();
                const int changes = sign_changes(gs.psi);
                ok = ok && psi_min > 0.0 && changes == 0;
                min_psi = std::min(min_psi, psi_min);
                add_params(ground, P).add(gs.lambda0).add(psi_min).add(changes).add(gs.simplicity_gap).add(
                    spec.orthogonality_defect).add(acc.strictly_decreasing).add(acc.min_gap);

                for (int ell : {0, 2}) {
                    const auto small = assemble_operator(build_grid(P.dimension(), 10.0, 60, config.grid.grading), P,
                                                         ell, true);
                    const auto values = top_eigenvalues(small, 10);
                    const auto reference = dense_top_eigenvalues(small, 10);
                    for (int k = 0; k < 10; ++k) {
                        const double rel = relative_difference(values[k], reference[k]);
                        dense_dev = std::max(dense_dev, rel);
                        ok = ok && rel <= config.tol("dense_oracle");
                        add_params(dense, P).add(ell).add(k).add(values[k]).add(reference[k]).add(rel);
                    }
                }
            }
            const auto hop = assemble_operator(build_grid(3, 12.0, 2000, 2.0), RadialModel::harmonic(3), 0, true);
            const double lambda_h = ground_state(hop).lambda0;
            const double herr = std::abs(lambda_h + 3.0);
            ok = ok && herr <= config.tol("harmonic");
            harmonic.row().add(3).add(12.0).add(2000).add(lambda_h).add(-3.0).add(herr);
            return Outcome{ok, "max eigenvalue " + fmt(max_eigenvalue) + "; min psi/max psi " + fmt(min_psi)
                                   + "; harmonic |lambda0 + 3| = " + fmt(herr) + "; dense rel dev " + fmt(dense_dev)};
        }));

    CsvTable conv(param_columns({"R", "n", "lambda0", "rel_change", "turning_radius"}));
    out.claims.push_back(evaluate(
        "C6", "spectrum", "ground eigenvalue converges under n- and R-doubling", {"convergence.csv"}, false, [&] {
            bool ok = true;
            double worst_n = 0.0, worst_R = 0.0;
            const int n0 = std::max(config.grid.n, 800);
            for (const auto& P : config.params) {
                const auto lambda = [&](double R, int n) {
                    return ground_state(
                               assemble_operator(build_grid(P.dimension(), R, n, config.grid.grading), P, 0, true))
                        .lambda0;
                };
                const double R = config.grid.R;
                const double base = lambda(R, n0);
                const double finer = lambda(R, 2 * n0);
                const double wider = lambda(2.0 * R, 2 * n0);
                const double turning = std::pow(std::abs(base), 1.0 / P.beta());
                const double dn = relative_difference(base, finer);
                const double dR = relative_difference(base, wider);
                ok = ok && dn < config.tol("n_doubling") && dR < config.tol("R_doubling") && R > turning;
                worst_n = std::max(worst_n, dn);
                worst_R = std::max(worst_R, dR);
                add_params(conv, P).add(R).add(n0).add(base).add(0.0).add(turning);
                add_params(conv, P).add(R).add(2 * n0).add(finer).add(dn).add(turning);
                add_params(conv, P).add(2.0 * R).add(2 * n0).add(wider).add(dR).add(turning);
            }
            return Outcome{ok, "n-doubling max rel change " + fmt(worst_n) + "; R-doubling " + fmt(worst_R)};
        }));
    out.tables.emplace_back("spectrum.csv", std::move(eigen));
    out.tables.emplace_back("ground_state.csv", std::move(ground));
    out.tables.emplace_back("dense_oracle.csv", std::move(dense));
    out.tables.emplace_back("harmonic.csv", std::move(harmonic));
    out.tables.emplace_back("convergence.csv", std::move(conv));
    return out;
}

// ---------------------------------------------------------------- semigroup

SuiteOutput run_semigroup(const ExperimentConfig& config)
{
    SuiteOutput out;
    CsvTable pos(param_columns({"profile", "step", "t", "min_relative", "max_excess", "retries", "ok"}));
    out.claims.push_back(evaluate(
        "C7", "semigroup", "positivity and domination T(t) <= S(t)", {"positivity.csv"}, false, [&] {
            bool ok = true;
            double worst_min = 0.0, worst_excess = -std::numeric_limits<double>::infinity();
            const std::vector<double> times{0.1, 1.0};
            for (const auto& P : config.params) {
                const auto grid = config_grid(config, P.dimension());
                const auto op = assemble_operator(grid, P, 0, true);
                const double R = grid.R;
                const std::vector<std::pair<std::string, std::function<double(double)>>> data{
                    {"gauss@0", [](double r) { return std::exp(-r * r / 4.0); }},
                    {"gauss@R/4", [R](double r) { return std::exp(-std::pow((r - 0.25 * R) / 2.0, 2)); }},
                    {"one", [](double) { return 1.0; }},
                };
                for (const auto& [name, profile] : data) {
                    Vector u0(static_cast<Eigen::Index>(grid.size()));
                    for (std::size_t i = 0; i < grid.size(); ++i)
                        u0[static_cast<Eigen::Index>(i)] = profile(grid.nodes[i]);
                    for (double step : {1e-3, 5e-4}) {
                        const auto ev = evolve(op, u0, times, step);
                        const auto dom = domination_check(P, grid, u0, times, step);
                        for (std::size_t j = 0; j < times.size(); ++j) {
                            const double min_rel = ev.states[j].minCoeff() / u0.cwiseAbs().maxCoeff();
                            const bool row_ok = min_rel >= -config.tol("positivity")
                                                && dom.max_excess[j] <= config.tol("domination");
                            ok = ok && row_ok;
                            worst_min = std::min(worst_min, min_rel);
                            worst_excess = std::max(worst_excess, dom.max_excess[j]);
                            add_params(pos, P).add(name).add(step).add(times[j]).add(min_rel).add(dom.max_excess[j]).add(
                                ev.retries).add(row_ok);
                        }
                    }
                }
            }
            return Outcome{ok, "min u/|u0|inf = " + fmt(worst_min) + "; max (u_T - u_S) = " + fmt(worst_excess)};
        }));

    CsvTable decay(param_columns({"R", "outer_max", "monotone_in_r", "retries"}));
    out.claims.push_back(evaluate(
        "C8", "semigroup", "C0 invariance: T(t)1 vanishes at infinity", {"decay.csv"}, false, [&] {
            bool ok = true;
            std::string numbers;
            const std::vector<double> radii{20.0, 40.0, 80.0};
            for (const auto& P : config.params) {
                const auto profile = decay_of_one(P, 1.0, radii);
                ok = ok && profile.decreasing_in_R;
                for (std::size_t i = 0; i < radii.size(); ++i)
                    add_params(decay, P).add(radii[i]).add(profile.outer_max[i]).add(
                        static_cast<bool>(profile.monotone_in_r[i])).add(profile.retries[i]);
                numbers += (numbers.empty() ? "" : "; ") + short_label(P) + " " + fmt(profile.outer_max.front(), 3)
                           + " -> " + fmt(profile.outer_max.back(), 3);
            }
            return Outcome{ok, "outer max of T(1)1 over R=20..80: " + numbers};
        }));

    CsvTable kernel(param_columns({"n", "t", "kernel_sup", "argmax_radius", "channels", "tail_bound", "rel_change"}));
    out.claims.push_back(evaluate(
        "C9", "semigroup", "ultracontractivity: sup p(t,x,x) finite", {"kernel.csv"}, true, [&] {
            bool ok = true;
            double worst_change = 0.0;
            const std::vector<double> times{0.1, 0.25, 0.5, 1.0};
            for (const auto& P : config.params) {
                std::vector<std::vector<double>> sups;
                for (int scale : {1, 2}) {
                    const auto grid = config_grid(config, P.dimension(), 1.0, scale);
                    const auto spectra = kernel_spectra(P, grid, times.front());
                    sups.emplace_back();
                    for (double t : times) {
                        const auto diag = kernel_diagnostics(spectra, grid, t);
                        const bool finite = std::isfinite(diag.kernel_sup) && diag.kernel_sup > 0.0;
                        const bool monotone = sups.back().empty() || diag.kernel_sup <= sups.back().back() * (1.0 + 1e-12);
                        ok = ok && finite && monotone;
                        const double change =
                            scale == 2 ? relative_difference(diag.kernel_sup, sups.front()[sups.back().size()]) : 0.0;
                        if (scale == 2) {
                            ok = ok && change < config.tol("kernel_stability");
                            worst_change = std::max(worst_change, change);
                        }
                        sups.back().push_back(diag.kernel_sup);
                        add_params(kernel, P).add(static_cast<int>(grid.size())).add(t).add(diag.kernel_sup).add(
                            diag.argmax_radius).add(diag.channels).add(diag.tail_bound).add(change);
                    }
                }
            }
            return Outcome{ok, "kernel sup nonincreasing in t; max rel change under n-doubling " + fmt(worst_change)};
        }));
    out.tables.emplace_back("positivity.csv", std::move(pos));
    out.tables.emplace_back("decay.csv", std::move(decay));
    out.tables.emplace_back("kernel.csv", std::move(kernel));
    return out;
}

// ---------------------------------------------------------------- green

SuiteOutput run_green(const ExperimentConfig& config)
{
    SuiteOutput out;
    CsvTable newton({"N", "region", "nodes", "max_rel_dev"});
    CsvTable bound(param_columns({"R", "n", "k", "C_k", "argmax_radius", "growth", "positive", "decreasing"}));
    out.claims.push_back(evaluate(
        "C10", "green", "G(x,0) <= C_k |x|^(2-N) (1+m|x|)^(-k)", {"newtonian.csv", "green.csv"}, true, [&] {
            bool ok = true;
            double worst_newton = 0.0, worst_growth = 0.0;
            std::set<int> dims;
            for (const auto& P : config.params)
                dims.insert(P.dimension());
            for (int N : dims) {
                const auto grid = config_grid(config, N);
                const auto gs = green_at_origin(RadialModel::laplacian(N), grid);
                const double norm = (N - 2) * sphere_area(N);
                const double R = grid.R;
                double mid = 0.0, inner = 0.0;
                int mid_count = 0, inner_count = 0;
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const double r = grid.nodes[i];
                    const double g = gs.G0[static_cast<Eigen::Index>(i)];
                    if (r >= 0.25 * R && r <= 0.75 * R) {
                        const double exact = (std::pow(r, 2.0 - N) - std::pow(R, 2.0 - N)) / norm;
                        mid = std::max(mid, std::abs(g / exact - 1.0));
                        ++mid_count;
                    }
                    if (std::pow(r / R, N - 2) < 5e-3) {
                        inner = std::max(inner, std::abs(g * norm * std::pow(r, N - 2) - 1.0));
                        ++inner_count;
                    }
                }
                ok = ok && mid <= config.tol("newtonian") && inner <= config.tol("newtonian") && mid_count > 0;
                worst_newton = std::max({worst_newton, mid, inner});
                newton.row().add(N).add("mid-domain vs Dirichlet kernel").add(mid_count).add(mid);
                newton.row().add(N).add("inner vs free kernel").add(inner_count).add(inner);
            }

            const std::vector<int> ks{2, 4};
            for (const auto& P : config.params) {
                const auto profile = fit_m_exponent(P, numerics::geomspace(1e-2, 2.0 * config.grid.R, 16));
                std::vector<GreenBoundRow> previous;
                for (int scale : {1, 2}) {
                    const auto grid = config_grid(config, P.dimension(), scale, scale);
                    auto gs = green_at_origin(P, grid);
                    bool positive = gs.G0.minCoeff() > 0.0, decreasing = true;
                    for (Eigen::Index i = 0; i + 1 < gs.G0.size(); ++i)
                        decreasing = decreasing && gs.G0[i + 1] < gs.G0[i];
                    const auto rows = verify_green_bound(gs, profile, ks);
                    ok = ok && positive && decreasing;
                    for (std::size_t j = 0; j < rows.size(); ++j) {
                        const double growth = previous.empty() ? 0.0 : rows[j].C_k / previous[j].C_k - 1.0;
                        ok = ok && std::isfinite(rows[j].C_k) && growth < config.tol("green_growth");
                        worst_growth = std::max(worst_growth, growth);
                        add_params(bound, P).add(grid.R).add(static_cast<int>(grid.size())).add(rows[j].k).add(
                            rows[j].C_k).add(rows[j].argmax_radius).add(growth).add(positive).add(decreasing);
                    }
                    previous = rows;
                }
            }
            return Outcome{ok, "Newtonian max rel dev " + fmt(worst_newton) + "; C_k growth under R-doubling "
                                   + fmt(worst_growth) + " (bounded surrogate)"};
        }));
    out.tables.emplace_back("newtonian.csv", std::move(newton));
    out.tables.emplace_back("green.csv", std::move(bound));
    return out;
}

// ---------------------------------------------------------------- weighted

SuiteOutput run_weighted(const ExperimentConfig& config)
{
    SuiteOutput out;
    CsvTable table(param_columns({"estimate", "domain", "sup_ratio", "worst_profile", "max_growth"}));
    CsvTable spectral(param_columns({"domain", "spectral_bound_ratio"}));
    out.claims.push_back(evaluate(
        "C11", "weighted", "weighted L^p bounds for u = A^(-1) f", {"weighted.csv", "weighted_spectral.csv"}, true,
        [&] {
            bool ok = true;
            double worst_growth = -std::numeric_limits<double>::infinity(), worst_spectral = 0.0;
            for (const auto& P : config.params)
                for (double p : {2.0, 3.0}) {
                    WeightedEstimateSpec spec;
                    spec.gammas = {0.0, 0.5 * P.beta(), P.beta()};
                    spec.p = p;
                    spec.domains = {config.grid.R, 2.0 * config.grid.R};
                    spec.nodes_per_unit = config.grid.n / config.grid.R;
                    spec.grading = config.grid.grading;
                    const auto report = weighted_estimate_report(P.with_p(p), spec);
                    for (const auto& row : report.rows) {
                        ok = ok && row.max_growth < config.tol("weighted_growth");
                        worst_growth = std::max(worst_growth, row.max_growth);
                        for (std::size_t d = 0; d < report.domains.size(); ++d)
                            add_params(table, P.with_p(p)).add(row.estimate).add(report.domains[d]).add(
                                row.sup_ratio[d]).add(row.worst_profile[d]).add(row.max_growth);
                    }
                    for (std::size_t d = 0; d < report.spectral_bound_ratio.size(); ++d) {
                        ok = ok && report.spectral_bound_ratio[d] <= 1.0 + 1e-9;
                        worst_spectral = std::max(worst_spectral, report.spectral_bound_ratio[d]);
                        add_params(spectral, P.with_p(p)).add(report.domains[d]).add(report.spectral_bound_ratio[d]);
                    }
                }
            return Outcome{ok, "max growth under domain doubling " + fmt(worst_growth)
                                   + "; p=2 |lambda0| |u|/|f| <= " + fmt(worst_spectral) + " (bounded surrogate)"};
        }));
    out.tables.emplace_back("weighted.csv", std::move(table));
    out.tables.emplace_back("weighted_spectral.csv", std::move(spectral));
    return out;
}

// ---------------------------------------------------------------- sector

SuiteOutput run_sector(const ExperimentConfig& config)
{
    SuiteOutput out;
    CsvTable shifts(param_columns({"c_tilde", "omega", "omega_scan", "rel_diff", "delta", "theta_alpha",
                                   "theta_rotation", "min_slack"}));
    CsvTable rays(param_columns({"ell", "angle_over_pi", "sup_scaled", "bound", "exact", "ok"}));
    CsvTable norms(param_columns({"ell", "angle_over_pi", "modulus", "resolvent_norm"}));
    out.claims.push_back(evaluate(
        "C12", "sector", "sectorial resolvent bound |l| |R(l)| <= 1/sin(pi - phi)",
        {"sector.csv", "rays.csv", "resolvent_norms.csv"}, false, [&] {
            bool ok = true;
            double worst_shift = 0.0, worst_slack = std::numeric_limits<double>::infinity(), worst_ray = 0.0;
            const std::vector<double> angles{0.6 * std::numbers::pi, 0.75 * std::numbers::pi, 0.9 * std::numbers::pi};
            const auto moduli = numerics::geomspace(1e-1, 1e3, 41);
            for (const auto& P : config.params) {
                const auto grid = config_grid(config, P.dimension());
                for (int ell : {0, 1, 2}) {
                    const auto op = assemble_operator(grid, P, ell, true);
                    std::vector<RayScan> scans;
                    if (ell == 0) {
                        const auto report = analyze_sector(P, op, 0.0, angles, moduli, config.seed);
                        for (double c : {report.c_tilde, 1.0}) {
                            const double omega = feasible_shift(P, c);
                            const double scanned = feasible_shift_scan(P, c);
                            const double rel = std::abs(omega - scanned) / std::max(1.0, std::abs(omega));
                            const auto angle = sector_angle(P, c);
                            const double slack = c == report.c_tilde
                                                     ? report.min_slack
                                                     : dissipativity_slack(P, c, omega,
                                                                           numerics::geomspace(1e-4, 1e4, 20001));
                            ok = ok && rel <= config.tol("sector_shift") && slack >= -config.tol("sector_slack");
                            worst_shift = std::max(worst_shift, rel);
                            worst_slack = std::min(worst_slack, slack);
                            add_params(shifts, P).add(c).add(omega).add(scanned).add(rel).add(angle.delta).add(
                                angle.theta_alpha).add(angle.theta_rotation).add(slack);
                        }
                        scans = P.p() == 2.0 ? report.rays : resolvent_norm_scan(op, angles, moduli, 2.0);
                        if (P.p() != 2.0)
                            for (const auto& sampled : report.rays)
                                add_params(rays, P).add(ell).add(sampled.angle / std::numbers::pi).add(sampled.sup_scaled).add(
                                    sampled.bound).add(false).add(true);
                    } else {
                        scans = resolvent_norm_scan(op, angles, moduli, 2.0);
                    }
                    for (const auto& scan : scans) {
                        const bool row_ok = scan.sup_scaled <= scan.bound + config.tol("sector_ray");
                        ok = ok && row_ok;
                        worst_ray = std::max(worst_ray, scan.sup_scaled / scan.bound);
                        add_params(rays, P.with_p(2.0)).add(ell).add(scan.angle / std::numbers::pi).add(scan.sup_scaled).add(
                            scan.bound).add(scan.exact).add(row_ok);
                        for (std::size_t j = 0; j < scan.moduli.size(); ++j)
                            add_params(norms, P.with_p(2.0)).add(ell).add(scan.angle / std::numbers::pi).add(scan.moduli[j]).add(
                                scan.norms[j]);
                    }
                }
            }
            return Outcome{ok, "shift closed form vs scan " + fmt(worst_shift) + "; min slack " + fmt(worst_slack)
                                   + "; max sup|l||R|/bound " + fmt(worst_ray)};
        }));
    out.tables.emplace_back("sector.csv", std::move(shifts));
    out.tables.emplace_back("rays.csv", std::move(rays));
    out.tables.emplace_back("resolvent_norms.csv", std::move(norms));
    return out;
}

// ---------------------------------------------------------------- orchestration

using SuiteFn = SuiteOutput (*)(const ExperimentConfig&);

SuiteFn suite_function(const std::string& name)
{
    if (name == "lyapunov")
        return run_lyapunov;
    if (name == "mfunction")
        return run_mfunction;
    if (name == "rholder")
        return run_rholder;
    if (name == "spectrum")
        return run_spectrum;
    if (name == "semigroup")
        return run_semigroup;
    if (name == "green")
        return run_green;
    if (name == "weighted")
        return run_weighted;
    if (name == "sector")
        return run_sector;
    throw InputError("unknown suite '" + name + "'");
}

const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& suite_claims()
{
    static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> claims{
        {"semigroup",
         {{"C7", "positivity and domination T(t) <= S(t)"},
          {"C8", "C0 invariance: T(t)1 vanishes at infinity"},
          {"C9", "ultracontractivity: sup p(t,x,x) finite"}}},
        {"green", {{"C10", "G(x,0) <= C_k |x|^(2-N) (1+m|x|)^(-k)"}}},
        {"sector", {{"C12", "sectorial resolvent bound |l| |R(l)| <= 1/sin(pi - phi)"}}},
    };
    return claims;
}

SuiteOutput skipped_suite(const std::string& name)
{
    SuiteOutput out;
    for (const auto& [id, anchor] : suite_claims().at(name)) {
        ClaimResult c;
        c.id = id;
        c.suite = name;
        c.anchor = anchor;
        c.verdict = Verdict::Skipped;
        c.summary = "skipped: the spectrum suite failed";
        out.claims.push_back(std::move(c));
    }
    return out;
}

std::vector<SuiteOutput> run_parallel(const ExperimentConfig& config, const std::vector<std::string>& names)
{
    std::vector<SuiteOutput> results(names.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < names.size(); i = next++)
            results[i] = suite_function(names[i])(config);
    };
    const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, config.jobs)), names.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    return results;
}

int claim_number(const std::string& id) { return std::stoi(id.substr(1)); }

std::string run_header(const ExperimentConfig& config)
{
    std::ostringstream out;
    out << "parameter sets:";
    for (const auto& P : config.params)
        out << ' ' << short_label(P) << (P.p() != 2.0 ? " p=" + fmt(P.p()) : "");
    out << "\ngrid: R=" << fmt(config.grid.R, 17) << " n=" << config.grid.n << " grading=" << fmt(config.grid.grading, 17)
        << "\nseed: " << config.seed << "\nsuites:";
    for (const auto& s : config.suites)
        out << ' ' << s;
    if (config.suites.empty())
        out << " (none)";
    out << "\n\n";
    return out.str();
}

} // namespace

VerificationReport run_config(const ExperimentConfig& config)
{
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec || !std::filesystem::is_directory(config.output_dir))
        throw InputError("cannot create output directory '" + config.output_dir.string() + "'");

    const std::set<std::string> dependent{"semigroup", "green", "sector"};
    std::vector<std::string> first, second;
    for (const auto& s : config.suites)
        (dependent.count(s) ? second : first).push_back(s);

    auto outputs = run_parallel(config, first);
    bool spectrum_failed = false;
    for (const auto& o : outputs)
        for (const auto& c : o.claims)
            spectrum_failed = spectrum_failed || (c.suite == "spectrum" && c.verdict == Verdict::Fail);
    if (spectrum_failed) {
        for (const auto& s : second)
            outputs.push_back(skipped_suite(s));
    } else {
        auto more = run_parallel(config, second);
        std::move(more.begin(), more.end(), std::back_inserter(outputs));
    }

    VerificationReport report;
    for (auto& o : outputs) {
        for (auto& c : o.claims)
            report.claims.push_back(std::move(c));
        for (const auto& [file, table] : o.tables)
            table.write(config.output_dir / file);
    }
    std::sort(report.claims.begin(), report.claims.end(),
              [](const ClaimResult& a, const ClaimResult& b) { return claim_number(a.id) < claim_number(b.id); });

    std::ofstream(config.output_dir / "claims.csv", std::ios::binary) << claims_csv(report);
    std::ofstream(config.output_dir / "summary.txt", std::ios::binary) << run_header(config) << render_report(report);
    std::ofstream timing(config.output_dir / "timing.txt", std::ios::binary);
    for (const auto& c : report.claims)
        timing << c.id << ' ' << fmt(c.runtime_seconds, 6) << '\n';
    return report;
}

} // namespace udiff
