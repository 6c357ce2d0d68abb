#include "switchbench/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "switchbench/core.hpp"

namespace switchbench {

namespace {

// Two-sided 97.5% Student t quantiles for 1..30 degrees of freedom.
constexpr std::array<double, 30> kT975 = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                          2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                          2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};

double t975(std::size_t df) { return df == 0 ? 0.0 : (df <= kT975.size() ? kT975[df - 1] : 1.96); }

}  // namespace

double nearest_rank_quantile(std::span<const double> values, double level) {
    if (values.empty()) throw InvalidArgument("quantile of an empty sample");
    if (!(level > 0.0 && level <= 1.0)) throw InvalidArgument("quantile level must lie in (0,1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

double mean_of(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return values.empty() ? 0.0 : s / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double m = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

double frequency_standard_error(double p, std::size_t count) {
    return count == 0 ? 0.0 : std::sqrt(p * (1.0 - p) / static_cast<double>(count));
}

StatSummary summarize(std::span<const double> regrets, std::span<const std::size_t> switches,
                      std::span<const std::size_t> epochs, std::span<const double> thresholds) {
    if (regrets.empty()) throw InvalidArgument("summary needs at least one replication");
    StatSummary s;
    s.count = regrets.size();
    s.mean_regret = mean_of(regrets);
    s.std_error_regret = standard_error(regrets);
    double sw = 0.0;
    for (auto v : switches) {
        sw += static_cast<double>(v);
        s.max_switches = std::max(s.max_switches, v);
    }
    s.mean_switches = sw / static_cast<double>(switches.size());
    double ep = 0.0;
    for (auto v : epochs) ep += static_cast<double>(v);
    s.mean_epochs = ep / static_cast<double>(epochs.size());

    std::vector<double> sorted(regrets.begin(), regrets.end());
    std::sort(sorted.begin(), sorted.end());
    for (double level : kQuantileLevels) s.quantiles[level] = nearest_rank_quantile(sorted, level);

    std::vector<double> cuts(thresholds.begin(), thresholds.end());
    if (cuts.empty()) {
        for (const auto& [level, value] : s.quantiles) cuts.push_back(value);
    }
    for (double cut : cuts) {
        const auto above = sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), cut);
        s.tail_frequencies[cut] = static_cast<double>(above) / static_cast<double>(sorted.size());
    }
    return s;
}

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidArgument("slope fit needs matching x and y");
    if (x.size() < 2) throw InvalidArgument("slope fit needs at least two points");
    const std::size_t k = x.size();
    std::vector<double> lx(k), ly(k);
    for (std::size_t i = 0; i < k; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw InvalidArgument("log-log fit needs positive values");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    const double mx = mean_of(lx);
    const double my = mean_of(ly);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw InvalidArgument("slope fit needs distinct x values");
    SlopeFit fit;
    fit.points = k;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (k > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double r = ly[i] - fit.intercept - fit.slope * lx[i];
            rss += r * r;
        }
        fit.std_error = std::sqrt(rss / static_cast<double>(k - 2) / sxx);
    }
    const double half = t975(k - 2) * fit.std_error;
    fit.ci_low = fit.slope - half;
    fit.ci_high = fit.slope + half;
    return fit;
}

}  // namespace switchbench
