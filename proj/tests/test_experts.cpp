#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "switchbench/adversaries.hpp"
#include "switchbench/experts.hpp"
#include "switchbench/game.hpp"
#include "switchbench/stats.hpp"

using namespace switchbench;

namespace {

// Reference FTL: lowest-index argmin of the running column sums.
std::vector<ActionId> ftl_oracle(const LossMatrix& L) {
    std::vector<double> cum(L.actions(), 0.0);
    std::vector<ActionId> out;
    for (std::size_t t = 1; t <= L.rounds(); ++t) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < cum.size(); ++i) {
            if (cum[i] < cum[best]) best = i;
        }
        out.push_back(ActionId{best});
        auto r = L.row(t);
        for (std::size_t i = 0; i < cum.size(); ++i) cum[i] += r[i];
    }
    return out;
}

LossMatrix random_matrix(std::size_t T, std::size_t n, RandomStream& rng, bool binary) {
    LossMatrix L(T, n);
    for (std::size_t t = 1; t <= T; ++t) {
        for (auto& v : L.row(t)) v = binary ? (rng.bernoulli(0.5) ? 1.0 : 0.0) : rng.uniform();
    }
    return L;
}

}  // namespace

TEST_CASE("ftl_choose") {
    std::vector<double> a{0.5, 0.2}, b{0.0, 0.0}, c{0.0, 0.5};
    CHECK(ftl_choose(a) == ActionId{1});
    CHECK(ftl_choose(b) == ActionId{0});
    CHECK(ftl_choose(c) == ActionId{0});
}

TEST_CASE("zero schedule is FTL") {
    RandomStream rng(1);
    for (int k = 0; k < 50; ++k) {
        auto L = random_matrix(30, 4, rng, true);
        auto p = make_ftl();
        auto tr = run_full_info(*p, L, RandomStream(k));
        CHECK(tr.actions() == ftl_oracle(L));
    }
}

TEST_CASE("injected perturbations") {
    FplPolicy p(PerturbationSchedule::injected({{0.1, 0.9}}));
    p.reset({3, 2}, RandomStream(0));
    CHECK(p.choose(1) == ActionId{0});

    FplPolicy q(PerturbationSchedule::injected({{0.3, 0.0}}));
    q.reset({2, 2}, RandomStream(0));
    CHECK(q.choose(1) == ActionId{1});
    std::vector<double> l1{1.0, 0.0};
    q.observe(l1);
    // cumulative perturbed (1.3, 0.0)
    CHECK(q.choose(2) == ActionId{1});
}

TEST_CASE("injected schedule makes FPL a function of the losses only") {
    RandomStream rng(2);
    auto L = random_matrix(40, 3, rng, false);
    std::vector<std::vector<double>> rows;
    for (int t = 0; t <= 40; ++t) rows.push_back({rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5});
    auto a = make_fpl(PerturbationSchedule::injected(rows));
    auto b = make_fpl(PerturbationSchedule::injected(rows));
    CHECK(run_full_info(*a, L, RandomStream(1)).actions() == run_full_info(*b, L, RandomStream(999)).actions());
}

TEST_CASE("PR with all +1/2 perturbations coincides with FTL") {
    RandomStream rng(3);
    for (int k = 0; k < 30; ++k) {
        auto L = random_matrix(25, 5, rng, true);
        std::vector<std::vector<double>> half(26, std::vector<double>(5, 0.5));
        auto p = make_fpl(PerturbationSchedule::injected(half));
        CHECK(run_full_info(*p, L, RandomStream(k)).actions() == ftl_oracle(L));
    }
}

TEST_CASE("MFPL perturbs only the first round") {
    FplPolicy p(PerturbationSchedule::exponential_initial(0.5), true);
    RandomStream rng(4);
    auto L = random_matrix(20, 3, rng, false);
    run_full_info(p, L, RandomStream(5));
    const auto h = p.history();
    REQUIRE(h.perturbations.size() == 21);
    REQUIRE(h.leaders.size() == 21);
    for (double v : h.perturbations[0]) CHECK(v > 0.0);
    for (std::size_t t = 1; t < h.perturbations.size(); ++t) {
        for (double v : h.perturbations[t]) CHECK(v == 0.0);
    }
    CHECK_THROWS_AS(PerturbationSchedule::exponential_initial(0.0), InvalidArgument);
}

TEST_CASE("MFPL with vanishing noise behaves as FTL after round 1") {
    // The noise still breaks the all-zero tie of round 1; from round 2 on the
    // continuous losses dominate it.
    RandomStream rng(6);
    auto L = random_matrix(50, 4, rng, false);
    auto p = make_mfpl(1e300);
    auto a = run_full_info(*p, L, RandomStream(1)).actions();
    auto f = ftl_oracle(L);
    CHECK(std::equal(a.begin() + 1, a.end(), f.begin() + 1));
}

TEST_CASE("PR perturbations are +-1/2") {
    FplPolicy p(PerturbationSchedule::uniform_half(), true);
    RandomStream rng(7);
    auto L = random_matrix(50, 6, rng, true);
    run_full_info(p, L, RandomStream(8));
    std::size_t plus = 0, total = 0;
    for (const auto& row : p.history().perturbations) {
        for (double v : row) {
            CHECK((v == 0.5 || v == -0.5));
            plus += v > 0;
            ++total;
        }
    }
    CHECK(std::abs(static_cast<double>(plus) / total - 0.5) < 0.05);
}

TEST_CASE("PR round-1 choice follows the lowest-index tie rule") {
    // With ties broken to the lowest index, action i > 1 is chosen iff the first i-1
    // draws are +1/2 and draw i is -1/2: P(i) = 2^-i; action 1 also collects the all-+1/2 case.
    const std::size_t n = 4;
    const int N = 40000;
    std::vector<double> counts(n, 0.0);
    for (int s = 0; s < N; ++s) {
        auto p = make_pr();
        p->reset({1, n}, RandomStream(static_cast<std::uint64_t>(s)));
        counts[p->choose(1).value] += 1;
    }
    std::vector<double> expect(n);
    for (std::size_t i = 0; i < n; ++i) expect[i] = std::pow(0.5, static_cast<double>(i + 1));
    expect[0] += std::pow(0.5, static_cast<double>(n));
    double chi = 0.0;
    for (std::size_t i = 0; i < n; ++i) chi += std::pow(counts[i] - N * expect[i], 2) / (N * expect[i]);
    CHECK(chi < 11.34);  // 3 dof, 1%
}

TEST_CASE("MFPL expected switches stay under the stability bound") {
    const std::size_t T = 2000, n = 10;
    const double eps = 0.01;
    std::vector<double> sw;
    for (std::uint64_t r = 0; r < 300; ++r) {
        RandomStream adv(derive_seed(17, r, StreamRole::adversary));
        auto L = iid_bernoulli(T, n, adv);
        auto p = make_mfpl(eps);
        sw.push_back(static_cast<double>(switches_of(run_full_info(*p, L, RandomStream(derive_seed(17, r, StreamRole::algorithm))))));
    }
    const double bound = (eps * T + 2.0 * std::log(static_cast<double>(n))) / (1.0 - eps);
    CHECK(mean_of(sw) <= bound + 3.0 * standard_error(sw));
}

TEST_CASE("MFPL stability bound worked value") {
    const double eps = 0.01, T = 1e4;
    CHECK((eps * T + 2.0 * std::log(10.0)) / (1.0 - eps) == doctest::Approx(105.66).epsilon(1e-3));
}

TEST_CASE("PR switch bound worked value") {
    const double T = 1e4;
    CHECK(4.0 * std::sqrt(2.0 * T * std::log(10.0)) + 4.0 * std::log(T) + 4.0 == doctest::Approx(899.3).epsilon(1e-3));
}

TEST_CASE("FPL rejects out-of-order calls and bad loss vectors") {
    auto p = make_ftl();
    p->reset({3, 2}, RandomStream(0));
    std::vector<double> l{0.0, 1.0};
    CHECK_THROWS_AS(p->observe(l), ProtocolError);
    p->choose(1);
    std::vector<double> wide{0.0, 1.0, 0.0};
    CHECK_THROWS_AS(p->observe(wide), InvalidArgument);
    std::vector<double> big{0.0, 2.0};
    CHECK_THROWS_AS(p->observe(big), InvalidArgument);
}

TEST_CASE("SD with zero losses never switches") {
    LossMatrix L(200, 5);
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto p = make_sd(0.3);
        CHECK(switches_of(run_full_info(*p, L, RandomStream(s))) == 0);
    }
    CHECK_THROWS_AS(make_sd(0.0), InvalidArgument);
    CHECK_THROWS_AS(make_sd(1.0), InvalidArgument);
}

TEST_CASE("SD switches are dominated by Bernoulli(eta)") {
    const std::size_t T = 1000;
    const double eta = 0.05;
    std::vector<double> sw;
    for (std::uint64_t r = 0; r < 1000; ++r) {
        RandomStream adv(derive_seed(5, r, StreamRole::adversary));
        auto L = iid_bernoulli(T, 4, adv);
        auto p = make_sd(eta);
        sw.push_back(static_cast<double>(switches_of(run_full_info(*p, L, RandomStream(derive_seed(5, r, StreamRole::algorithm))))));
    }
    CHECK(mean_of(sw) <= eta * T + 3.0 * std::sqrt(static_cast<double>(T)) / 2.0);
}

TEST_CASE("SD per-step keep probability") {
    // Loss 1 on whatever SD played: switching needs a resample (prob eta) that lands elsewhere.
    const double eta = 0.2;
    std::size_t switched = 0, steps = 0;
    for (std::uint64_t s = 0; s < 20000; ++s) {
        SdPolicy p(eta);
        p.reset({2, 2}, RandomStream(s));
        const ActionId first = p.choose(1);
        std::vector<double> l(2, 0.0);
        l[first.value] = 1.0;
        p.observe(l);
        switched += p.choose(2) != first;
        ++steps;
    }
    // Resample weights are (1-eta, 1) after the loss, so P(switch) = eta / (2 - eta).
    const double expect = eta / (2.0 - eta);
    const double freq = static_cast<double>(switched) / steps;
    CHECK(std::abs(freq - expect) < 3.0 * frequency_standard_error(expect, steps));
    CHECK(freq <= eta);
}

TEST_CASE("lagged wrapper") {
    RandomStream rng(9);
    auto L = random_matrix(60, 3, rng, true);
    SUBCASE("p = 0 leaves the base trace unchanged") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            LaggedWrapper w(make_mfpl(0.2), 0.0, 30);
            auto base = make_mfpl(0.2);
            CHECK(run_full_info(w, L, RandomStream(s)).actions() == run_full_info(*base, L, RandomStream(s)).actions());
        }
    }
    SUBCASE("p = 1 with bad_rounds = T is constant") {
        LaggedWrapper w(make_mfpl(0.2), 1.0, 60);
        auto tr = run_full_info(w, L, RandomStream(1));
        CHECK(switches_of(tr) == 0);
        CHECK(tr[0].action == ActionId{2});
        CHECK(w.lagging());
    }
    SUBCASE("p = 1 plays bottom for bad_rounds then follows the base") {
        LaggedWrapper w(make_ftl(), 1.0, 10, ActionId{0});
        auto tr = run_full_info(w, L, RandomStream(1));
        const auto ftl = ftl_oracle(L);
        for (std::size_t t = 0; t < 10; ++t) CHECK(tr[t].action == ActionId{0});
        for (std::size_t t = 10; t < 60; ++t) CHECK(tr[t].action == ftl[t]);
    }
    SUBCASE("bad_rounds beyond the horizon") {
        LaggedWrapper w(make_ftl(), 0.5, 61);
        CHECK_THROWS_AS(w.reset({60, 3}, RandomStream(0)), InvalidArgument);
    }
}

TEST_CASE("constant and alternating players") {
    LossMatrix L(5, 2, 0.25);
    ConstantPolicy c(ActionId{1});
    CHECK(switches_of(run_full_info(c, L, RandomStream(0))) == 0);
    AlternatingPolicy a;
    auto tr = run_full_info(a, L, RandomStream(0));
    CHECK(switches_of(tr) == 4);
    CHECK(tr[0].action == ActionId{0});
    ConstantPolicy bad(ActionId{2});
    CHECK_THROWS_AS(bad.reset({5, 2}, RandomStream(0)), InvalidArgument);
}
