// Command-line front end: run, report and validate.
#include "udiff/error.hpp"
#include "udiff/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int exit_usage = 2;

void apply_overrides(udiff::ExperimentConfig& config, const std::optional<long long>& seed,
                     const std::string& out, const std::optional<int>& jobs)
{
    if (seed) {
        if (*seed < 0)
            throw udiff::InputError("--seed must be nonnegative");
        config.seed = static_cast<std::uint64_t>(*seed);
    }
    if (!out.empty())
        config.output_dir = out;
    if (jobs) {
        if (*jobs < 1)
            throw udiff::InputError("--jobs must be at least 1");
        config.jobs = *jobs;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical verification lab for (1+|x|^a) Laplacian - |x|^b on R^N"};
    app.require_subcommand(1);

    std::string config_path, bundle_path, out;
    std::optional<long long> seed;
    std::optional<int> jobs;

    auto* run = app.add_subcommand("run", "run the suites of a config file and write a result bundle");
    run->add_option("config", config_path, "INI config file")->required();
    run->add_option("--seed", seed, "seed for sampled families (overrides [run] seed)");
    run->add_option("--out", out, "bundle directory (overrides [run] output_dir)");
    run->add_option("--jobs", jobs, "suites run in parallel");

    auto* report = app.add_subcommand("report", "print the claim table of a bundle");
    report->add_option("bundle", bundle_path, "bundle directory")->required();

    auto* validate = app.add_subcommand("validate", "parse a config file and print the resolved settings");
    validate->add_option("config", config_path, "INI config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*run) {
            auto config = udiff::parse_config(config_path);
            apply_overrides(config, seed, out, jobs);
            const auto result = udiff::run_config(config);
            std::cout << udiff::render_report(result) << "bundle: " << config.output_dir.string() << '\n';
            return result.exit_code();
        }
        if (*report) {
            const auto result = udiff::load_report(bundle_path);
            std::cout << udiff::render_report(result);
            return result.exit_code();
        }
        const auto config = udiff::parse_config(config_path);
        std::cout << "parameter sets:\n";
        for (const auto& p : config.params)
            std::cout << "  " << p.label() << '\n';
        std::cout << "grid: R=" << config.grid.R << " n=" << config.grid.n << " grading=" << config.grid.grading
                  << "\nsuites:";
        for (const auto& s : config.suites)
            std::cout << ' ' << s;
        std::cout << "\nseed: " << config.seed << "\noutput_dir: " << config.output_dir.string()
                  << "\njobs: " << config.jobs << "\nconfig OK\n";
        return 0;
    } catch (const udiff::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return exit_usage;
    } catch (const udiff::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
