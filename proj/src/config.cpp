#include "udiff/error.hpp"
#include "udiff/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace udiff {
namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& where, const std::string& text)
{
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw InputError(where + ": '" + text + "' is not a number");
    return value;
}

long long to_integer(const std::string& where, const std::string& text)
{
    const std::string t = trim(text);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
        throw InputError(where + ": '" + text + "' is not an integer");
    return value;
}

void reject_unknown(const std::string& section, const boost::property_tree::ptree& tree,
                    const std::set<std::string>& allowed)
{
    for (const auto& [key, _] : tree)
        if (!allowed.count(key))
            throw InputError("[" + section + "]: unknown key '" + key + "'");
}

OperatorParams parse_params(const std::string& section, const boost::property_tree::ptree& tree)
{
    reject_unknown(section, tree, {"N", "alpha", "beta", "p"});
    for (const char* key : {"N", "alpha", "beta"})
        if (!tree.count(key))
            throw InputError("[" + section + "]: missing key '" + key + "'");
    const auto N = to_integer(section + ".N", tree.get<std::string>("N"));
    const double alpha = to_double(section + ".alpha", tree.get<std::string>("alpha"));
    const double beta = to_double(section + ".beta", tree.get<std::string>("beta"));
    const double p = tree.count("p") ? to_double(section + ".p", tree.get<std::string>("p")) : 2.0;
    try {
        return OperatorParams(static_cast<int>(N), alpha, beta, p);
    } catch (const ParameterError& e) {
        throw InputError("[" + section + "]: " + e.what());
    }
}

std::vector<std::string> parse_suites(const std::string& text)
{
    std::set<std::string> requested;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            continue;
        if (item == "all") {
            requested.insert(known_suites().begin(), known_suites().end());
            continue;
        }
        if (std::find(known_suites().begin(), known_suites().end(), item) == known_suites().end())
            throw InputError("[run]: unknown suite '" + item + "'");
        requested.insert(item);
    }
    std::vector<std::string> ordered;
    for (const auto& s : known_suites())
        if (requested.count(s))
            ordered.push_back(s);
    return ordered;
}

} // namespace

const std::map<std::string, double>& default_tolerances()
{
    static const std::map<std::string, double> defaults{
        {"lyapunov_bound", 1e-9},     {"lyapunov_oracle", 1e-6},    {"m_slope", 0.1},
        {"m_oracle", 1e-4},           {"rh_constant", 1e-9},        {"rh_growth", 0.05},
        {"harmonic", 1e-3},           {"dense_oracle", 1e-10},      {"n_doubling", 1e-3},
        {"R_doubling", 1e-4},         {"positivity", 1e-12},        {"domination", 1e-10},
        {"kernel_stability", 0.05},   {"newtonian", 1e-2},          {"green_growth", 0.1},
        {"weighted_growth", 0.1},     {"sector_shift", 1e-6},       {"sector_ray", 1e-8},
        {"sector_slack", 1e-9},
    };
    return defaults;
}

const std::vector<std::string>& known_suites()
{
    static const std::vector<std::string> suites{"lyapunov", "mfunction", "rholder", "spectrum",
                                                 "semigroup", "green",     "weighted", "sector"};
    return suites;
}

double ExperimentConfig::tol(const std::string& key) const
{
    const auto it = tolerances.find(key);
    if (it == tolerances.end())
        throw ParameterError("unknown tolerance '" + key + "'");
    return it->second;
}

std::vector<OperatorParams> default_parameter_sets()
{
    return {OperatorParams(3, 3.0, 2.0), OperatorParams(3, 4.0, 3.0), OperatorParams(4, 3.0, 2.5),
            OperatorParams(3, 3.0, 4.0)};
}

ExperimentConfig parse_config_text(const std::string& text)
{
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw InputError(std::string("config: ") + e.what());
    }

    ExperimentConfig config;
    config.suites.clear();
    bool suites_given = false;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw InputError("config: key '" + section + "' outside any section");
        if (section == "params" || section.rfind("params.", 0) == 0) {
            config.params.push_back(parse_params(section, body));
        } else if (section == "grid") {
            reject_unknown(section, body, {"R", "n", "grading"});
            if (body.count("R"))
                config.grid.R = to_double("grid.R", body.get<std::string>("R"));
            if (body.count("n"))
                config.grid.n = static_cast<int>(to_integer("grid.n", body.get<std::string>("n")));
            if (body.count("grading"))
                config.grid.grading = to_double("grid.grading", body.get<std::string>("grading"));
            if (!(config.grid.R > 0.0) || config.grid.n < 16 || !(config.grid.grading >= 1.0))
                throw InputError("[grid]: need R > 0, n >= 16 and grading >= 1");
        } else if (section == "run") {
            reject_unknown(section, body, {"suites", "seed", "output_dir", "jobs"});
            if (body.count("suites")) {
                config.suites = parse_suites(body.get<std::string>("suites"));
                suites_given = true;
            }
            if (body.count("seed")) {
                const auto seed = to_integer("run.seed", body.get<std::string>("seed"));
                if (seed < 0)
                    throw InputError("[run]: seed must be nonnegative");
                config.seed = static_cast<std::uint64_t>(seed);
            }
            if (body.count("output_dir"))
                config.output_dir = trim(body.get<std::string>("output_dir"));
            if (body.count("jobs")) {
                config.jobs = static_cast<int>(to_integer("run.jobs", body.get<std::string>("jobs")));
                if (config.jobs < 1)
                    throw InputError("[run]: jobs must be at least 1");
            }
        } else if (section == "tolerances") {
            for (const auto& [key, value] : body) {
                if (!default_tolerances().count(key))
                    throw InputError("[tolerances]: unknown tolerance '" + key + "'");
                const double v = to_double("tolerances." + key, value.data());
                if (!(v > 0.0))
                    throw InputError("[tolerances]: '" + key + "' must be positive");
                config.tolerances[key] = v;
            }
        } else {
            throw InputError("config: unknown section [" + section + "]");
        }
    }
    if (config.params.empty())
        config.params = default_parameter_sets();
    if (!suites_given)
        config.suites = known_suites();
    return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Pass:
        return "pass";
    case Verdict::BoundedSurrogate:
        return "bounded-surrogate";
    case Verdict::Fail:
        return "fail";
    case Verdict::Skipped:
        return "skipped";
    }
    return "fail";
}

Verdict verdict_from_string(const std::string& s)
{
    if (s == "pass")
        return Verdict::Pass;
    if (s == "bounded-surrogate")
        return Verdict::BoundedSurrogate;
    if (s == "fail")
        return Verdict::Fail;
    if (s == "skipped")
        return Verdict::Skipped;
    throw InputError("unknown verdict '" + s + "'");
}

bool VerificationReport::any_fail() const
{
    return std::any_of(claims.begin(), claims.end(), [](const ClaimResult& c) { return c.verdict == Verdict::Fail; });
}

} // namespace udiff
