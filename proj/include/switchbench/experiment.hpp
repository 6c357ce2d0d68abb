#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "switchbench/core.hpp"
#include "switchbench/stats.hpp"

namespace switchbench {

/// Invalid configuration; `key()` names the offending entry.
class ConfigError : public InvalidArgument {
public:
    ConfigError(std::string key, const std::string& message)
        : InvalidArgument(key + ": " + message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a budgeted algorithm exceeds its switch limit. Never expected.
class BudgetViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// One experiment. Algorithm- and adversary-specific settings live in the
/// `alg.*` and `adv.*` maps (keys stored without the prefix).
struct GameConfig {
    std::string algorithm;
    std::string adversary;
    std::size_t T = 0;
    std::size_t n = 0;
    std::optional<std::size_t> S;
    std::optional<double> c;
    std::optional<double> delta;
    std::map<std::string, std::string> alg;
    std::map<std::string, std::string> adv;
    std::size_t replications = 1;
    std::uint64_t base_seed = 0;
    std::vector<double> tail_thresholds;
    std::optional<std::string> decision_set;  // path; combinatorial algorithms only

    friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

/// Flat `key = value` document; '#' starts a comment. Recognized keys:
/// algorithm, adversary, T, n, S, c, delta, replications, seed, tail_thresholds
/// (comma separated), decision_set, alg.<name>, adv.<name>.
GameConfig parse_config(std::istream& in);
GameConfig load_config(const std::string& path);

/// Inverse of parse_config (stable key order).
std::string format_config(const GameConfig& config);

enum class GameKind { full_info, bandit, combinatorial };

struct ParamSpec {
    std::string key;  // as written in a config file, e.g. "delta" or "alg.eps"
    bool required = false;
    std::string help;
};

struct RegistryEntry {
    std::string id;
    std::string summary;
    std::vector<ParamSpec> params;
};

struct AlgorithmInfo : RegistryEntry {
    GameKind kind = GameKind::full_info;
};

struct AdversaryInfo : RegistryEntry {
    bool adaptive = false;
    bool bandit_ok = true;
    bool combinatorial_ok = true;
};

const std::vector<AlgorithmInfo>& algorithm_registry();
const std::vector<AdversaryInfo>& adversary_registry();

/// Throws ConfigError unless the configuration is complete and consistent.
void validate_config(const GameConfig& config);

/// Hard switch limit for budgeted algorithms, none otherwise.
std::optional<std::size_t> switch_limit(const GameConfig& config);

struct RunRow {
    std::size_t run_id = 0;  // 1-based replication index
    std::uint64_t seed = 0;  // replication seed; streams are derived from it
    double regret = 0.0;
    std::size_t switches = 0;
    std::size_t epochs = 0;

    friend bool operator==(const RunRow&, const RunRow&) = default;
};

/// Seed of replication r (0-based): mix_seed(base_seed, r).
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t replication);

struct ExperimentResult {
    GameConfig config;
    std::vector<RunRow> rows;
    StatSummary summary;
    double wall_seconds = 0.0;  // informational; never emitted
};

/// Runs a single replication (0-based index).
RunRow run_replication(const GameConfig& config, std::size_t replication);

/// Runs every replication on up to `jobs` threads (0 = hardware concurrency);
/// rows are ordered by replication index, so the result does not depend on `jobs`.
ExperimentResult monte_carlo(const GameConfig& config, std::size_t jobs = 0);

/// Summary recomputed from rows with the config's tail thresholds.
StatSummary summarize_rows(const std::vector<RunRow>& rows, const std::vector<double>& thresholds);

struct SweepResult {
    std::string parameter;
    std::vector<double> grid;
    std::vector<ExperimentResult> points;
    SlopeFit fit;  // ln(mean regret) against ln(parameter)
};

/// Copy of `config` with `parameter` (S, c, T or n) set to `value`.
GameConfig with_parameter(const GameConfig& config, const std::string& parameter, double value);

/// monte_carlo at every grid point; grid must have >= 3 strictly increasing positive values.
SweepResult sweep(const GameConfig& config, const std::string& parameter, const std::vector<double>& grid,
                  std::size_t jobs = 0);

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);

void write_results(std::ostream& out, const ExperimentResult& result, OutputFormat format);
void write_sweep(std::ostream& out, const SweepResult& result, OutputFormat format);

/// Writes to `path`, or stdout when path is "-" or empty. IoError names the path.
void emit_results(const ExperimentResult& result, const std::string& path, OutputFormat format);
void emit_sweep(const SweepResult& result, const std::string& path, OutputFormat format);

struct ParsedResults {
    std::vector<RunRow> rows;
    StatSummary summary;
};

/// Reads the CSV produced by write_results back, summary block included.
ParsedResults read_results_csv(std::istream& in);

}  // namespace switchbench
