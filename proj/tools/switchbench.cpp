// switchbench: run, sweep and verify switching-budget experiments.
//
// Exit codes: 0 ok, 1 verification failure, 2 configuration error, 3 I/O error.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "switchbench/experiment.hpp"
#include "switchbench/verify.hpp"

using namespace switchbench;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct Options {
    std::string config;
    std::string out = "-";
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 0;
    std::string param;
    std::string grid;
    std::string suite = "all";
    std::optional<std::size_t> binomial_T;
    std::optional<double> binomial_r;
};

// Flag beats environment, environment beats the config file.
GameConfig load_with_seed(const Options& o) {
    GameConfig c = load_config(o.config);
    if (const char* env = std::getenv("SWITCHBENCH_SEED"); env && *env) {
        std::istringstream in(std::string("seed = ") + env);
        c.base_seed = parse_config(in).base_seed;
    }
    if (o.seed) c.base_seed = *o.seed;
    return c;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("grid", "not a number: '" + item + "'");
        }
    }
    return out;
}

int cmd_run(const Options& o) {
    const auto format = parse_format(o.format);
    const GameConfig c = load_with_seed(o);
    validate_config(c);
    const auto result = monte_carlo(c, o.jobs);
    emit_results(result, o.out, format);
    return kOk;
}

int cmd_sweep(const Options& o) {
    const auto format = parse_format(o.format);
    if (o.param.empty()) throw ConfigError("param", "missing");
    const auto grid = parse_grid(o.grid);
    const GameConfig c = load_with_seed(o);
    validate_config(c);
    const auto result = sweep(c, o.param, grid, o.jobs);
    emit_sweep(result, o.out, format);
    std::cerr << "slope " << result.fit.slope << " [" << result.fit.ci_low << ", " << result.fit.ci_high << "]\n";
    return kOk;
}

int cmd_verify(const Options& o) {
    std::vector<VerifyReport> reports;
    if (o.binomial_T || o.binomial_r) {
        if (o.suite != "binomial") throw ConfigError("suite", "--T and --r apply to the binomial suite");
        if (!o.binomial_T || !o.binomial_r) throw ConfigError("r", "--T and --r must be given together");
        reports.push_back(verify_binomial_tails(*o.binomial_T, *o.binomial_r));
    } else {
        const auto& names = verification_suites();
        if (std::find(names.begin(), names.end(), o.suite) == names.end()) {
            throw ConfigError("suite", "unknown suite '" + o.suite + "'");
        }
        reports = run_verification_suite(o.suite, o.seed.value_or(20240601));
    }
    bool ok = true;
    for (const auto& r : reports) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
        ok = ok && r.passed;
    }
    return ok ? kOk : kVerifyFailed;
}

int cmd_list() {
    auto kind_name = [](GameKind k) {
        switch (k) {
            case GameKind::full_info: return "full-info";
            case GameKind::bandit: return "bandit";
            case GameKind::combinatorial: return "combinatorial";
        }
        return "";
    };
    auto params = [](const RegistryEntry& e) {
        for (const auto& p : e.params) {
            std::cout << "    " << p.key << (p.required ? " (required)" : " (optional)") << "  " << p.help << '\n';
        }
    };
    std::cout << "algorithms:\n";
    for (const auto& a : algorithm_registry()) {
        std::cout << "  " << a.id << " [" << kind_name(a.kind) << "]  " << a.summary << '\n';
        params(a);
    }
    std::cout << "adversaries:\n";
    for (const auto& a : adversary_registry()) {
        std::cout << "  " << a.id << (a.adaptive ? " [adaptive]" : "") << "  " << a.summary << '\n';
        params(a);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Switching-budget online learning benchmarks"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "flat key = value config file")->required();
        sub->add_option("--out", o.out, "output path, '-' for stdout");
        sub->add_option("--format", o.format, "csv or json");
        sub->add_option("--seed", o.seed, "base seed override");
        sub->add_option("--jobs", o.jobs, "worker threads (0 = all cores)");
    };
    auto* run = app.add_subcommand("run", "Monte Carlo replications of one configuration");
    add_common(run);
    auto* sw = app.add_subcommand("sweep", "run a grid over one parameter and fit a log-log slope");
    add_common(sw);
    sw->add_option("--param", o.param, "S, c, T or n")->required();
    sw->add_option("--grid", o.grid, "comma-separated values")->required();
    auto* ver = app.add_subcommand("verify", "Monte Carlo and exact checks of the concentration lemmas");
    ver->add_option("--suite", o.suite, "pev, mgf, binomial, fpl, btl or all");
    ver->add_option("--seed", o.seed, "seed for the Monte Carlo suites");
    ver->add_option("--T", o.binomial_T, "binomial check: number of trials");
    ver->add_option("--r", o.binomial_r, "binomial check: deviation in units of sqrt(T)");
    auto* list = app.add_subcommand("list", "registered algorithms and adversaries");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return cmd_run(o);
        if (*sw) return cmd_sweep(o);
        if (*ver) return cmd_verify(o);
        if (*list) return cmd_list();
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const BudgetViolation& e) {
        std::cerr << "budget violation: " << e.what() << '\n';
        return kVerifyFailed;
    } catch (const InvalidArgument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kVerifyFailed;
    }
    return kOk;
}
