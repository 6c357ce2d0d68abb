#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "switchbench/combinatorial.hpp"
#include "switchbench/core.hpp"
#include "switchbench/experts.hpp"
#include "switchbench/random.hpp"

namespace switchbench {

inline constexpr double kFplTolerance = 1e-9;

/// Terms of the FPL regret decomposition for one run:
///   regret <= M * (switches + terminal moves) + sum_e max_i sum_{t in e} P_t(i) - sum_t P_t(i_t).
struct FplInequality {
    double regret = 0.0;
    double loss_range = 0.0;
    std::size_t switches = 0;
    std::size_t terminal_moves = 0;
    double max_perturbation = 0.0;     // sum over epochs of the best perturbation total
    double played_perturbation = 0.0;  // sum over epochs of the played perturbations
    double bound = 0.0;                // right-hand side including terminal moves
    double literal_bound = 0.0;        // right-hand side with switches only

    bool holds(double tolerance = kFplTolerance) const { return regret <= bound + tolerance; }
};

FplInequality evaluate_fpl_inequality(const RunTrace& trace, const LossMatrix& losses,
                                      std::span<const FplCertificate> certificates);

/// True iff the decomposition holds within 1e-9. Throws when `certificates` is empty.
bool check_fpl_inequality(const RunTrace& trace, const LossMatrix& losses,
                          std::span<const FplCertificate> certificates);

/// Combinatorial form; the max term is max_v (sum_{t in e} P_t) . v via the set's oracle,
/// and M is the per-round vertex loss spread.
FplInequality evaluate_fpl_inequality(const CombTrace& trace, const DecisionSet& set, const LossMatrix& losses,
                                      std::span<const FplCertificate> certificates);

/// Be-The-Leader on losses rows 0..T (row 0 included): with i_{s+1} the argmin of
/// the prefix sums through s, sum_s l_s(i_{s+1}) <= sum_s l_s(i) for every i.
bool be_the_leader_holds(std::span<const std::vector<double>> losses, double tolerance = kFplTolerance);

/// Perturbed losses lhat_s = l_s + P_{s+1}, s = 0..T, from a recorded FPL history.
std::vector<std::vector<double>> perturbed_losses(const LossMatrix& losses, const FplHistory& history);

struct VerifyReport {
    std::string name;
    bool passed = false;
    double estimate = 0.0;
    double bound = 0.0;
    double std_error = 0.0;
    std::string detail;
};

/// Frequency of sum_{e<=N} max_i Exp(1) exceeding 6 N ln n; passes iff <= e^{-N} + 3 SE.
VerifyReport verify_pev(std::size_t N, std::size_t n, std::size_t reps, RandomStream rng);

/// Monte Carlo E[exp(t X)], X the max of n Exp(1); passes iff <= n^t / (1 - t) + 3 SE.
VerifyReport verify_mgf(double t, std::size_t n, std::size_t reps, RandomStream rng);

/// P(Bin(T, 1/2) >= threshold) by log-space summation.
double binomial_upper_tail(std::size_t T, std::size_t threshold);

/// Exact tail at T/2 + r sqrt(T); passes iff it lies in [exp(-5 r^2), exp(-2 r^2)].
/// Requires r > 0, r <= sqrt(T)/4 and r sqrt(T) an integer (InvalidArgument otherwise).
VerifyReport verify_binomial_tails(std::size_t T, double r);

/// Names accepted by run_verification_suite.
const std::vector<std::string>& verification_suites();

/// Runs one named suite ("pev", "mgf", "binomial", "fpl", "btl") or "all".
std::vector<VerifyReport> run_verification_suite(const std::string& suite, std::uint64_t seed);

}  // namespace switchbench
