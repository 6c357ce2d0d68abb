#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "switchbench/adversaries.hpp"
#include "switchbench/core.hpp"
#include "switchbench/random.hpp"

using namespace switchbench;

namespace {

LossMatrix matrix(std::size_t T, std::size_t n, std::vector<double> v) { return LossMatrix(T, n, std::move(v)); }

RunTrace trace_of(const LossMatrix& L, const std::vector<std::size_t>& actions) {
    RunTrace tr;
    for (std::size_t t = 0; t < actions.size(); ++t) tr.push(ActionId{actions[t]}, L.at(t + 1, ActionId{actions[t]}));
    return tr;
}

}  // namespace

TEST_CASE("best action in hindsight") {
    // column sums (2.0, 1.5)
    auto L = matrix(3, 2, {1.0, 0.5, 0.5, 0.5, 0.5, 0.5});
    auto [a, loss] = best_action_in_hindsight(L);
    CHECK(a == ActionId{1});
    CHECK(loss == doctest::Approx(1.5));

    auto zero = LossMatrix(4, 3);
    auto [z, zl] = best_action_in_hindsight(zero);
    CHECK(z == ActionId{0});
    CHECK(zl == 0.0);
}

TEST_CASE("best loss under iid Bernoulli sits below T/2") {
    // E[min of n Bin(T,1/2) columns] ~ T/2 - sqrt(T/4) * E[max of n normals]; for n=10 that factor is ~1.54.
    RandomStream rng(11);
    const std::size_t T = 10000, n = 10;
    double total = 0.0;
    const int reps = 40;
    for (int r = 0; r < reps; ++r) total += best_action_in_hindsight(iid_bernoulli(T, n, rng)).second;
    const double mean = total / reps;
    const double expected = T / 2.0 - 1.5388 * std::sqrt(T / 4.0);
    CHECK(mean == doctest::Approx(expected).epsilon(0.003));
    CHECK(mean < T / 2.0 - std::sqrt(T * std::log(10.0)) / 4.0);
}

TEST_CASE("regret of a trace") {
    // incurred (1,0,1); best column sum 1
    auto L = matrix(3, 2, {1, 0, 0, 1, 1, 0});
    auto tr = trace_of(L, {0, 0, 0});
    CHECK(regret_of(tr, L) == doctest::Approx(1.0));
    CHECK(regret_of(trace_of(L, {1, 1, 1}), L) == doctest::Approx(0.0));

    RunTrace short_trace;
    short_trace.push(ActionId{0}, 0.0);
    CHECK_THROWS_AS(regret_of(short_trace, L), InvalidArgument);
}

TEST_CASE("regret can be negative") {
    auto L = matrix(2, 2, {1, 0, 0, 1});
    CHECK(regret_of(trace_of(L, {1, 0}), L) == doctest::Approx(-1.0));
}

TEST_CASE("switch counting") {
    auto L = LossMatrix(4, 2);
    CHECK(switches_of(trace_of(L, {0, 0, 0})) == 0);
    auto tr = trace_of(L, {0, 1, 0, 1});
    CHECK(switches_of(tr) == 3);
    CHECK(switch_flags_consistent(tr));
    CHECK_FALSE(tr[0].is_switch);
    CHECK(tr[1].is_switch);
}

TEST_CASE("switching cost objective") {
    auto L = matrix(4, 2, {1, 0, 1, 0, 1, 0, 0, 1});
    auto tr2 = trace_of(L, {0, 1, 0, 0});
    // incurred 1 + 0 + 1 + 0 = 2, best 1, regret 1, switches 2 -> 1 + 2c
    CHECK(switching_cost_objective(tr2, L, 1.0) == doctest::Approx(3.0));
    CHECK(switching_cost_objective(tr2, L, 2.0) == doctest::Approx(5.0));
    CHECK_THROWS_AS(switching_cost_objective(tr2, L, 0.5), InvalidArgument);

    auto zeros = LossMatrix(5, 3);
    CHECK(switching_cost_objective(trace_of(zeros, {2, 2, 2, 2, 2}), zeros, 1.0) == 0.0);
}

TEST_CASE("switching cost objective adds c per switch") {
    // regret 3, 2 switches, c = 1 -> 5
    auto L = matrix(5, 2, {1, 0, 0, 1, 1, 0, 1, 0, 0, 0});
    auto tr = trace_of(L, {0, 1, 0, 0, 0});
    REQUIRE(regret_of(tr, L) == doctest::Approx(3.0));
    REQUIRE(switches_of(tr) == 2);
    CHECK(switching_cost_objective(tr, L, 1.0) == doctest::Approx(5.0));
}

TEST_CASE("loss range") {
    CHECK(loss_range_M(LossMatrix(3, 4, 0.5)) == 0.0);
    CHECK(loss_range_M(matrix(2, 2, {0.5, 0.5, 0.0, 1.0})) == 1.0);
}

TEST_CASE("argmin ties go to the lowest index") {
    std::vector<double> v{0.5, 0.2};
    CHECK(argmin(v) == ActionId{1});
    std::vector<double> w{0.0, 0.0};
    CHECK(argmin(w) == ActionId{0});
    std::vector<double> x{3, 1, 1, 2};
    CHECK(argmin(x) == ActionId{1});
}

TEST_CASE("loss matrix validation") {
    CHECK_NOTHROW(LossMatrix(2, 1, 0.0).validate());
    CHECK_THROWS_AS(LossMatrix(0, 2).validate(), InvalidArgument);
    CHECK_THROWS_AS(LossMatrix(2, 0).validate(), InvalidArgument);
    CHECK_THROWS_AS(matrix(1, 2, {0.0, 1.5}).validate(), InvalidArgument);
    CHECK_THROWS_AS(matrix(1, 2, {-0.1, 0.5}).validate(), InvalidArgument);
    CHECK_THROWS_AS(LossMatrix(2, 2, std::vector<double>{1.0}), InvalidArgument);
    auto L = LossMatrix(2, 2);
    L.set_best_arm(ActionId{5});
    CHECK_THROWS_AS(L.validate(), InvalidArgument);
}

TEST_CASE("round protocol rejects out-of-order calls") {
    RoundProtocol p;
    p.reset(2);
    CHECK_THROWS_AS(p.on_observe(), ProtocolError);
    CHECK_THROWS_AS(p.on_choose(2), ProtocolError);
    p.on_choose(1);
    CHECK_THROWS_AS(p.on_choose(1), ProtocolError);
    CHECK(p.on_observe() == 1);
    p.on_choose(2);
    CHECK(p.on_observe() == 2);
    CHECK_THROWS_AS(p.on_choose(3), ProtocolError);
}

TEST_CASE("trace properties on random instances") {
    RandomStream rng(3);
    for (int k = 0; k < 300; ++k) {
        const std::size_t T = 1 + rng.index(40), n = 1 + rng.index(6);
        LossMatrix L(T, n);
        for (std::size_t t = 1; t <= T; ++t) {
            for (auto& v : L.row(t)) v = rng.uniform();
        }
        std::vector<std::size_t> acts(T);
        for (auto& a : acts) a = rng.index(n);
        auto tr = trace_of(L, acts);
        CHECK(regret_of(tr, L) >= -static_cast<double>(T) * loss_range_M(L) - 1e-12);
        CHECK(switches_of(tr) <= T - 1);
        CHECK(switch_flags_consistent(tr));

        // Permuting rounds does not change the hindsight best action.
        std::vector<std::size_t> perm(T);
        std::iota(perm.begin(), perm.end(), 1);
        for (std::size_t i = T; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
        LossMatrix P(T, n);
        for (std::size_t t = 1; t <= T; ++t) {
            auto src = L.row(perm[t - 1]);
            std::copy(src.begin(), src.end(), P.row(t).begin());
        }
        auto a = best_action_in_hindsight(L);
        auto b = best_action_in_hindsight(P);
        CHECK(a.first == b.first);
        CHECK(a.second == doctest::Approx(b.second));
    }
}
