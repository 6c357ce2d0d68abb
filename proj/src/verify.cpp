#include "switchbench/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "switchbench/adversaries.hpp"
#include "switchbench/batching.hpp"
#include "switchbench/game.hpp"
#include "switchbench/stats.hpp"

namespace switchbench {

namespace {

struct PerturbationTerms {
    std::size_t terminal_moves = 0;
    double played = 0.0;
    std::size_t rounds = 0;
};

PerturbationTerms played_terms(std::span<const FplCertificate> certificates) {
    PerturbationTerms out;
    for (const auto& c : certificates) {
        out.terminal_moves += c.terminal_moved ? 1 : 0;
        out.played += c.played_perturbation;
        out.rounds += c.rounds;
    }
    return out;
}

void finish(FplInequality& f, const PerturbationTerms& terms) {
    f.terminal_moves = terms.terminal_moves;
    f.played_perturbation = terms.played;
    const double tail = f.max_perturbation - f.played_perturbation;
    f.bound = f.loss_range * static_cast<double>(f.switches + f.terminal_moves) + tail;
    f.literal_bound = f.loss_range * static_cast<double>(f.switches) + tail;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

FplInequality evaluate_fpl_inequality(const RunTrace& trace, const LossMatrix& losses,
                                      std::span<const FplCertificate> certificates) {
    const auto terms = played_terms(certificates);
    if (terms.rounds != trace.size()) throw InvalidArgument("certificates do not cover the trace");
    FplInequality f;
    f.regret = regret_of(trace, losses);
    f.loss_range = loss_range_M(losses);
    f.switches = switches_of(trace);
    for (const auto& c : certificates) {
        f.max_perturbation += *std::max_element(c.perturbation_totals.begin(), c.perturbation_totals.end());
    }
    finish(f, terms);
    return f;
}

bool check_fpl_inequality(const RunTrace& trace, const LossMatrix& losses,
                          std::span<const FplCertificate> certificates) {
    if (certificates.empty()) throw InvalidArgument("no FPL certificates for this policy");
    return evaluate_fpl_inequality(trace, losses, certificates).holds();
}

FplInequality evaluate_fpl_inequality(const CombTrace& trace, const DecisionSet& set, const LossMatrix& losses,
                                      std::span<const FplCertificate> certificates) {
    const auto terms = played_terms(certificates);
    if (terms.rounds != trace.size()) throw InvalidArgument("certificates do not cover the trace");
    FplInequality f;
    f.regret = comb_regret_of(trace, set, losses);
    f.loss_range = comb_loss_range(set, losses);
    f.switches = comb_switches_of(trace);
    for (const auto& c : certificates) f.max_perturbation += set.maximum(c.perturbation_totals);
    finish(f, terms);
    return f;
}

bool be_the_leader_holds(std::span<const std::vector<double>> losses, double tolerance) {
    if (losses.empty()) return true;
    const std::size_t n = losses.front().size();
    std::vector<double> prefix(n, 0.0);
    double lhs = 0.0;
    double scale = 1.0;
    for (const auto& row : losses) {
        if (row.size() != n) throw InvalidArgument("ragged loss rows");
        for (std::size_t i = 0; i < n; ++i) {
            prefix[i] += row[i];
            scale = std::max(scale, std::abs(row[i]));
        }
        lhs += row[argmin(prefix).value];
    }
    const double slack = tolerance * scale * static_cast<double>(losses.size());
    return std::all_of(prefix.begin(), prefix.end(), [&](double total) { return lhs <= total + slack; });
}

std::vector<std::vector<double>> perturbed_losses(const LossMatrix& losses, const FplHistory& history) {
    const std::size_t T = losses.rounds();
    if (history.perturbations.size() != T + 1) throw InvalidArgument("history must hold P_1..P_{T+1}");
    std::vector<std::vector<double>> out(T + 1);
    out[0] = history.perturbations[0];
    for (std::size_t s = 1; s <= T; ++s) {
        const auto row = losses.row(s);
        out[s] = history.perturbations[s];
        for (std::size_t i = 0; i < row.size(); ++i) out[s][i] += row[i];
    }
    return out;
}

VerifyReport verify_pev(std::size_t N, std::size_t n, std::size_t reps, RandomStream rng) {
    if (N < 2 || n < 2 || reps < 1) throw InvalidArgument("pev check needs N >= 2, n >= 2, reps >= 1");
    const double cut = 6.0 * static_cast<double>(N) * std::log(static_cast<double>(n));
    std::size_t above = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        double sum = 0.0;
        for (std::size_t e = 0; e < N; ++e) {
            double best = 0.0;
            for (std::size_t i = 0; i < n; ++i) best = std::max(best, rng.exponential());
            sum += best;
        }
        if (sum > cut) ++above;
    }
    VerifyReport rep;
    rep.name = "pev N=" + std::to_string(N) + " n=" + std::to_string(n);
    rep.estimate = static_cast<double>(above) / static_cast<double>(reps);
    rep.bound = std::exp(-static_cast<double>(N));
    rep.std_error = frequency_standard_error(rep.estimate, reps);
    rep.passed = rep.estimate <= rep.bound + 3.0 * rep.std_error;
    rep.detail = "P(sum > 6 N ln n) = " + fmt(rep.estimate) + " vs e^-N = " + fmt(rep.bound);
    return rep;
}

VerifyReport verify_mgf(double t, std::size_t n, std::size_t reps, RandomStream rng) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidArgument("mgf check needs t in (0, 1)");
    if (n < 1 || reps < 2) throw InvalidArgument("mgf check needs n >= 1 and reps >= 2");
    std::vector<double> values(reps);
    for (auto& v : values) {
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) best = std::max(best, rng.exponential());
        v = std::exp(t * best);
    }
    VerifyReport rep;
    rep.name = "mgf t=" + fmt(t) + " n=" + std::to_string(n);
    rep.estimate = mean_of(values);
    rep.std_error = standard_error(values);
    rep.bound = std::pow(static_cast<double>(n), t) / (1.0 - t);
    rep.passed = rep.estimate <= rep.bound + 3.0 * rep.std_error;
    rep.detail = "E exp(t max) = " + fmt(rep.estimate) + " vs n^t/(1-t) = " + fmt(rep.bound);
    return rep;
}

double binomial_upper_tail(std::size_t T, std::size_t threshold) {
    if (threshold == 0) return 1.0;
    if (threshold > T) return 0.0;
    const double lg = std::lgamma(static_cast<double>(T) + 1.0) - static_cast<double>(T) * std::log(2.0);
    std::vector<double> terms;
    terms.reserve(T - threshold + 1);
    for (std::size_t k = threshold; k <= T; ++k) {
        terms.push_back(lg - std::lgamma(static_cast<double>(k) + 1.0) -
                        std::lgamma(static_cast<double>(T - k) + 1.0));
    }
    const double top = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double x : terms) s += std::exp(x - top);
    return std::min(1.0, std::exp(top + std::log(s)));
}

VerifyReport verify_binomial_tails(std::size_t T, double r) {
    if (T < 1) throw InvalidArgument("binomial check needs T >= 1");
    const double root = std::sqrt(static_cast<double>(T));
    if (!(r > 0.0)) throw InvalidArgument("binomial check needs r > 0");
    if (r > root / 4.0 + 1e-12) throw InvalidArgument("binomial check needs r <= sqrt(T)/4");
    const double shift = r * root;
    const double rounded = std::round(shift);
    if (std::abs(shift - rounded) > 1e-9) throw InvalidArgument("binomial check needs r sqrt(T) integral");
    const auto threshold =
        static_cast<std::size_t>(std::ceil(static_cast<double>(T) / 2.0 + rounded - 1e-12));

    VerifyReport rep;
    rep.name = "binomial T=" + std::to_string(T) + " r=" + fmt(r);
    rep.estimate = binomial_upper_tail(T, threshold);
    const double low = std::exp(-5.0 * r * r);
    rep.bound = std::exp(-2.0 * r * r);
    rep.passed = rep.estimate >= low && rep.estimate <= rep.bound;
    rep.detail = "P(X >= " + std::to_string(threshold) + ") = " + fmt(rep.estimate) + " in [" + fmt(low) + ", " +
                 fmt(rep.bound) + "]";
    return rep;
}

const std::vector<std::string>& verification_suites() {
    static const std::vector<std::string> names = {"pev", "mgf", "binomial", "fpl", "btl", "all"};
    return names;
}

namespace {

std::vector<VerifyReport> pev_suite(RandomStream rng) {
    return {verify_pev(5, 10, 1000000, rng.child(1)), verify_pev(2, 2, 1000000, rng.child(2))};
}

std::vector<VerifyReport> mgf_suite(RandomStream rng) {
    return {verify_mgf(0.5, 2, 1000000, rng.child(1)), verify_mgf(0.5, 100, 100000, rng.child(2)),
            verify_mgf(1e-3, 2, 100000, rng.child(3))};
}

std::vector<VerifyReport> binomial_suite() {
    return {verify_binomial_tails(100, 1.0), verify_binomial_tails(400, 1.0), verify_binomial_tails(1600, 1.0)};
}

VerifyReport fpl_case(const std::string& label, const std::function<PolicyPtr()>& make,
                      const std::function<LossMatrix(RandomStream&)>& adversary, std::size_t reps,
                      RandomStream rng) {
    VerifyReport rep;
    rep.name = "fpl " + label;
    std::size_t violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < reps; ++r) {
        RandomStream adv = rng.child(2 * r);
        const LossMatrix L = adversary(adv);
        auto policy = make();
        const RunTrace trace = run_full_info(*policy, L, rng.child(2 * r + 1));
        const auto certs = policy->fpl_certificates();
        const auto f = evaluate_fpl_inequality(trace, L, certs);
        worst = std::max(worst, f.regret - f.bound);
        if (!f.holds()) ++violations;
    }
    rep.estimate = static_cast<double>(violations);
    rep.bound = 0.0;
    rep.passed = violations == 0;
    rep.detail = std::to_string(violations) + " violations in " + std::to_string(reps) +
                 " runs; max regret - bound = " + fmt(worst);
    return rep;
}

std::vector<VerifyReport> fpl_suite(RandomStream rng) {
    const std::size_t T = 200;
    const std::size_t n = 5;
    const std::size_t reps = 300;
    auto iid = [&](RandomStream& s) { return iid_bernoulli(T, n, s); };
    auto alt = [&](RandomStream&) { return alternating_two_action(T); };
    const std::vector<std::pair<std::string, std::function<PolicyPtr(std::size_t)>>> algs = {
        {"ftl", [](std::size_t) { return make_ftl(); }},
        {"mfpl", [&](std::size_t k) { return make_mfpl(bmfpl_parameters(T, k, 0.1).epsilon); }},
        {"pr", [](std::size_t) { return make_pr(); }},
        {"bmfpl", [&](std::size_t k) -> PolicyPtr { return bmfpl(T, k, 0.1, 5); }},
        {"bpr", [&](std::size_t k) -> PolicyPtr { return bpr(T, k, 0.1, 5); }},
    };
    std::vector<VerifyReport> out;
    std::uint64_t key = 0;
    for (const auto& [name, make] : algs) {
        out.push_back(fpl_case(name + " iid_bernoulli", [&] { return make(n); }, iid, reps, rng.child(++key)));
        out.push_back(fpl_case(name + " alternating", [&] { return make(2); }, alt, reps, rng.child(++key)));
    }

    // Combinatorial variant.
    const auto set = DecisionSet::top_m(10, 3);
    VerifyReport rep;
    rep.name = "fpl bcpr iid_bernoulli";
    std::size_t violations = 0;
    RandomStream comb = rng.child(++key);
    for (std::size_t r = 0; r < reps; ++r) {
        RandomStream adv = comb.child(2 * r);
        const LossMatrix L = iid_bernoulli(T, 10, adv);
        auto policy = bcpr(set, T, 0.1, 1.0, std::nullopt, 5);
        const CombTrace trace = run_combinatorial(*policy, L, comb.child(2 * r + 1));
        const auto certs = policy->fpl_certificates();
        if (!evaluate_fpl_inequality(trace, set, L, certs).holds()) ++violations;
    }
    rep.estimate = static_cast<double>(violations);
    rep.passed = violations == 0;
    rep.detail = std::to_string(violations) + " violations in " + std::to_string(reps) + " runs";
    out.push_back(rep);
    return out;
}

std::vector<VerifyReport> btl_suite(RandomStream rng) {
    VerifyReport rep;
    rep.name = "btl random instances";
    const std::size_t instances = 2000;
    std::size_t failures = 0;
    for (std::size_t k = 0; k < instances; ++k) {
        const std::size_t n = 1 + rng.index(12);
        const std::size_t rows = 1 + rng.index(60);
        std::vector<std::vector<double>> ell(rows, std::vector<double>(n));
        for (auto& row : ell) {
            for (auto& v : row) v = 3.0 * rng.uniform() - 1.0;
        }
        if (!be_the_leader_holds(ell)) ++failures;
    }
    rep.estimate = static_cast<double>(failures);
    rep.passed = failures == 0;
    rep.detail = std::to_string(failures) + " failures in " + std::to_string(instances) + " instances";
    return {rep};
}

}  // namespace

std::vector<VerifyReport> run_verification_suite(const std::string& suite, std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<VerifyReport> out;
    auto append = [&](std::vector<VerifyReport> part) {
        for (auto& r : part) out.push_back(std::move(r));
    };
    const bool all = suite == "all";
    if (all || suite == "pev") append(pev_suite(rng.child(1)));
    if (all || suite == "mgf") append(mgf_suite(rng.child(2)));
    if (all || suite == "binomial") append(binomial_suite());
    if (all || suite == "fpl") append(fpl_suite(rng.child(4)));
    if (all || suite == "btl") append(btl_suite(rng.child(5)));
    if (out.empty()) throw InvalidArgument("unknown verification suite '" + suite + "'");
    return out;
}

}  // namespace switchbench
