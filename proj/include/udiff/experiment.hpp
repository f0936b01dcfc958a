/**
 * @file experiment.hpp
 * @brief Configuration, suites and the claim report behind the command-line
 *        tool. A run writes a bundle directory: one CSV per numeric table,
 *        claims.csv with one row per claim, a deterministic summary.txt and a
 *        timing.txt kept apart so that reruns compare byte for byte.
 */
#pragma once

#include "udiff/operator_model.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace udiff {

struct GridSettings {
    double R = 40.0;
    int n = 800;
    double grading = 2.0;
};

/// Tolerance names accepted in the [tolerances] section, with defaults.
const std::map<std::string, double>& default_tolerances();

/// Suite names in execution order (without "all").
const std::vector<std::string>& known_suites();

struct ExperimentConfig {
    std::vector<OperatorParams> params;
    GridSettings grid;
    std::vector<std::string> suites; ///< expanded, deduplicated, execution order
    std::filesystem::path output_dir = "udiff-results";
    std::uint64_t seed = 20240611;
    int jobs = 1;
    std::map<std::string, double> tolerances = default_tolerances();

    double tol(const std::string& key) const;
};

/// The four shipped parameter sets.
std::vector<OperatorParams> default_parameter_sets();

/**
 * INI text: any number of [params] / [params.<name>] sections (keys N, alpha,
 * beta, p), [grid] (R, n, grading), [run] (suites, seed, output_dir, jobs) and
 * [tolerances]. Unknown sections, keys, suites or tolerance names raise
 * InputError, as do values that do not parse or violate parameter constraints.
 */
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::filesystem::path& path);

enum class Verdict { Pass, BoundedSurrogate, Fail, Skipped };
std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct ClaimResult {
    std::string id;       ///< C1 … C12
    std::string suite;
    std::string anchor;   ///< the statement being checked, in words
    Verdict verdict = Verdict::Skipped;
    std::string summary;  ///< key numbers
    std::vector<std::string> evidence; ///< CSV files in the bundle
    double runtime_seconds = 0.0;
};

struct VerificationReport {
    std::vector<ClaimResult> claims;
    bool any_fail() const;
    int exit_code() const { return any_fail() ? 1 : 0; }
};

/// Runs the configured suites and writes the bundle to config.output_dir.
VerificationReport run_config(const ExperimentConfig& config);

/// Reads a bundle written by run_config. Throws InputError when the
/// directory or its claims.csv is missing or malformed.
VerificationReport load_report(const std::filesystem::path& bundle);

/// Human-readable claim table.
std::string render_report(const VerificationReport& report);

} // namespace udiff
