#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace switchbench {

/// Monte Carlo aggregate over replications.
struct StatSummary {
    std::size_t count = 0;
    double mean_regret = 0.0;
    double std_error_regret = 0.0;
    double mean_switches = 0.0;
    double mean_epochs = 0.0;
    std::size_t max_switches = 0;
    /// probability level -> nearest-rank regret quantile
    std::map<double, double> quantiles;
    /// threshold -> fraction of replications with regret >= threshold
    std::map<double, double> tail_frequencies;

    friend bool operator==(const StatSummary&, const StatSummary&) = default;
};

inline constexpr double kQuantileLevels[] = {0.5, 0.9, 0.95, 0.99};

/// Nearest-rank quantile: the ceil(p N)-th smallest value (p in (0, 1]).
double nearest_rank_quantile(std::span<const double> values, double level);

double mean_of(std::span<const double> values);
/// Standard error of the mean (sample standard deviation / sqrt(N)); 0 for N < 2.
double standard_error(std::span<const double> values);

/// Standard error of an empirical frequency p over `count` trials.
double frequency_standard_error(double p, std::size_t count);

/// Summary of per-replication values. When `thresholds` is empty the tail
/// frequencies are reported at the quantile values.
StatSummary summarize(std::span<const double> regrets, std::span<const std::size_t> switches,
                      std::span<const std::size_t> epochs, std::span<const double> thresholds = {});

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t points = 0;
};

/// Least squares fit of ln(y) against ln(x); 95% interval from Student t with
/// points-2 degrees of freedom (degenerate, zero-width, for two points).
SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace switchbench
