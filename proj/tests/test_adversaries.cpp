#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "switchbench/adversaries.hpp"
#include "switchbench/game.hpp"
#include "switchbench/stats.hpp"

using namespace switchbench;

TEST_CASE("iid Bernoulli entries") {
    RandomStream rng(1);
    auto L = iid_bernoulli(2000, 5, rng);
    std::size_t ones = 0;
    for (double v : L.entries()) {
        CHECK((v == 0.0 || v == 1.0));
        ones += v == 1.0;
    }
    const double p = static_cast<double>(ones) / 10000.0;
    CHECK(std::abs(p - 0.5) < 3.0 * frequency_standard_error(0.5, 10000));
}

TEST_CASE("any player loses T/2 on average against iid Bernoulli") {
    std::vector<double> losses;
    for (std::uint64_t r = 0; r < 400; ++r) {
        RandomStream adv(derive_seed(2, r, StreamRole::adversary));
        auto L = iid_bernoulli(200, 4, adv);
        auto p = make_ftl();
        losses.push_back(run_full_info(*p, L, RandomStream(r)).total_loss());
    }
    CHECK(std::abs(mean_of(losses) - 100.0) < 3.0 * standard_error(losses));
}

TEST_CASE("batched Bernoulli") {
    SUBCASE("E = T draws exactly like iid") {
        RandomStream a(3), b(3);
        CHECK(batched_bernoulli(50, 4, 50, a) == iid_bernoulli(50, 4, b));
    }
    SUBCASE("E = 1 gives constant columns") {
        RandomStream rng(4);
        auto L = batched_bernoulli(30, 3, 1, rng);
        for (std::size_t t = 2; t <= 30; ++t) {
            for (std::size_t i = 0; i < 3; ++i) CHECK(L.row(t)[i] == L.row(1)[i]);
        }
    }
    SUBCASE("rows are constant within epochs") {
        RandomStream rng(5);
        auto L = batched_bernoulli(10, 2, 3, rng);
        // epochs of length 4: rounds 1-4, 5-8, 9-10
        for (std::size_t t : {2, 3, 4}) CHECK(L.row(t)[0] == L.row(1)[0]);
        for (std::size_t t : {6, 7, 8}) CHECK(L.row(t)[1] == L.row(5)[1]);
        CHECK(L.row(10)[0] == L.row(9)[0]);
    }
    RandomStream rng(6);
    CHECK_THROWS_AS(batched_bernoulli(10, 2, 0, rng), InvalidArgument);
    CHECK_THROWS_AS(batched_bernoulli(10, 2, 11, rng), InvalidArgument);
    CHECK(batched_bernoulli_epochs(10000, 16, 8) == static_cast<std::size_t>(std::ceil(64.0 / std::log(16.0))));
    CHECK(batched_bernoulli_epochs(100, 2, 1000) == 100);
}

TEST_CASE("alternating adversary") {
    auto L = alternating_two_action(6);
    CHECK(L.row(1)[0] == 0.0);
    CHECK(L.row(1)[1] == 0.5);
    CHECK(L.row(2)[0] == 1.0);
    CHECK(L.row(3)[1] == 1.0);
    for (std::size_t T : {2, 10, 100}) {
        CHECK(best_action_in_hindsight(alternating_two_action(T)).second == doctest::Approx(T / 2.0 - 0.5));
    }
    CHECK_THROWS_AS(alternating_two_action(6, 3), InvalidArgument);
}

TEST_CASE("shrinking dartboard tail adversary") {
    CHECK(sd_tail_length(1000, 0.02, 0.05) == doctest::Approx(58.56).epsilon(1e-3));
    CHECK(sd_tail_length(10, 0.02, 0.05) == 10.0);
    RandomStream rng(7);
    auto L = sd_tail_adversary(1000, 3, 0.02, 0.05, rng);
    REQUIRE(L.best_arm());
    const ActionId bad = *L.best_arm();
    for (std::size_t t = 1; t <= 1000; ++t) {
        for (std::size_t i = 0; i < 3; ++i) {
            const double expect = (t <= 59 && i == bad.value) ? 1.0 : 0.0;
            CHECK(L.row(t)[i] == expect);
        }
    }
    // A trace avoiding the bad arm has regret 0.
    const ActionId other{(bad.value + 1) % 3};
    ConstantPolicy p(other);
    CHECK(regret_of(run_full_info(p, L, RandomStream(0)), L) == 0.0);
}

TEST_CASE("follow the punisher") {
    auto adv = follow_punisher();
    SUBCASE("never switching collects T-1") {
        ConstantPolicy p(ActionId{0});
        auto [tr, L] = run_adaptive(p, *adv, {9, 2}, RandomStream(0));
        CHECK(tr.total_loss() == 8.0);
    }
    SUBCASE("realized rows") {
        auto pr = make_pr();
        auto [tr, L] = run_adaptive(*pr, *adv, {101, 3}, RandomStream(1));
        for (double v : L.row(1)) CHECK(v == 0.0);
        for (std::size_t t = 2; t <= 101; ++t) {
            double s = 0.0;
            for (double v : L.row(t)) s += v;
            CHECK(s == 1.0);
            CHECK(L.at(t, tr[t - 2].action) == 1.0);
        }
        CHECK(best_action_in_hindsight(L).second <= 50.0);
    }
    SUBCASE("loss t depends only on earlier actions") {
        adv->reset({5, 3});
        std::vector<ActionId> a{ActionId{1}, ActionId{2}, ActionId{0}};
        std::vector<ActionId> b{ActionId{1}, ActionId{0}, ActionId{2}};
        CHECK(adv->next(2, std::span<const ActionId>(a).first(1)) == adv->next(2, std::span<const ActionId>(b).first(1)));
    }
}

TEST_CASE("dyadic valuation and parent") {
    CHECK(dyadic_valuation(1) == 0);
    CHECK(dyadic_valuation(6) == 1);
    CHECK(dyadic_valuation(8) == 3);
    for (unsigned k = 0; k < 40; ++k) CHECK(dyadic_valuation(1LL << k) == k);
    CHECK_THROWS_AS(dyadic_valuation(0), InvalidArgument);
    CHECK_THROWS_AS(dyadic_valuation(-4), InvalidArgument);
    CHECK(dyadic_parent(1) == 0);
    CHECK(dyadic_parent(6) == 4);
    CHECK(dyadic_parent(7) == 6);
    CHECK(dyadic_parent(8) == 0);
}

TEST_CASE("multi-scale walk") {
    std::vector<double> z{0.1, 0.2, 0.4, 0.8, 1.6, 3.2};  // Z_1..Z_6
    auto w = mrw_walk_from_noise(z);
    CHECK(w[2] == doctest::Approx(0.2 + 0.4));  // W_3 = Z_2 + Z_3
    CHECK(w[5] == doctest::Approx(0.8 + 3.2));  // W_6 = Z_4 + Z_6
    CHECK(w[3] == doctest::Approx(0.8));        // W_4 = Z_4
    // With parent t-1 the walk is the running sum.
    auto s = mrw_walk_from_noise(z, [](std::size_t t) { return t - 1; });
    double acc = 0.0;
    for (std::size_t t = 0; t < z.size(); ++t) {
        acc += z[t];
        CHECK(s[t] == doctest::Approx(acc));
    }
}

TEST_CASE("MRW adversary") {
    CHECK(clip_unit(-0.2) == 0.0);
    CHECK(clip_unit(0.3) == 0.3);
    CHECK(clip_unit(1.4) == 1.0);

    const auto p = MrwParams::from_budget(1024, 4, 16);
    CHECK(p.sigma == doctest::Approx(1.0 / 90.0));
    CHECK(p.epsilon == doctest::Approx(2.0 / (54.0 * 4.0 * std::pow(10.0, 1.5))));
    CHECK_FALSE(p.epsilon_clamped);
    const auto big = MrwParams::from_budget(4, 1000000, 1);
    CHECK(big.epsilon_clamped);
    CHECK(big.epsilon == doctest::Approx(1.0 / 6.0));

    RandomStream rng(8);
    int unclipped = 0;
    for (int k = 0; k < 50; ++k) {
        auto inst = mrw_adversary(256, 3, 4, rng);
        REQUIRE(inst.losses.best_arm());
        const ActionId star = *inst.losses.best_arm();
        CHECK(inst.walk.size() == 256);
        inst.losses.validate();
        if (!inst.clipped) {
            ++unclipped;
            for (std::size_t t = 1; t <= 256; ++t) {
                for (std::size_t i = 0; i < 3; ++i) {
                    const double gap = inst.losses.row(t)[i] - inst.losses.at(t, star);
                    CHECK(gap == doctest::Approx(i == star.value ? 0.0 : inst.params.epsilon));
                }
            }
            auto sums = inst.losses.column_sums();
            for (std::size_t i = 0; i < 3; ++i) {
                if (i != star.value) CHECK(sums[i] - sums[star.value] == doctest::Approx(inst.params.epsilon * 256));
            }
            CHECK(best_action_in_hindsight(inst.losses).first == star);
        }
    }
    CHECK(unclipped > 0);
}

TEST_CASE("gap Bernoulli") {
    RandomStream rng(9);
    std::vector<double> diffs;
    for (int k = 0; k < 200; ++k) {
        auto L = gap_bernoulli(500, 3, 0.1, rng);
        REQUIRE(L.best_arm());
        auto sums = L.column_sums();
        const std::size_t other = (L.best_arm()->value + 1) % 3;
        diffs.push_back((sums[other] - sums[L.best_arm()->value]) / 500.0);
    }
    CHECK(std::abs(mean_of(diffs) - 0.1) < 3.0 * standard_error(diffs));
    CHECK_THROWS_AS(gap_bernoulli(10, 2, 0.5, rng), InvalidArgument);
}

TEST_CASE("bottom action column") {
    auto L = with_bottom_action(LossMatrix(4, 2, 0.25));
    CHECK(L.actions() == 3);
    for (std::size_t t = 1; t <= 4; ++t) CHECK(L.row(t)[2] == 1.0);
}

TEST_CASE("loss matrix CSV round trip") {
    RandomStream rng(10);
    LossMatrix L(25, 4);
    for (std::size_t t = 1; t <= 25; ++t) {
        for (auto& v : L.row(t)) v = rng.uniform();
    }
    std::stringstream ss;
    write_loss_matrix_csv(ss, L);
    CHECK(read_loss_matrix_csv(ss) == L);

    std::istringstream ragged("0,1\n0\n");
    CHECK_THROWS_AS(read_loss_matrix_csv(ragged), InvalidArgument);
    std::istringstream range("0,1.5\n");
    CHECK_THROWS_AS(read_loss_matrix_csv(range), InvalidArgument);
    std::istringstream junk("0,abc\n");
    CHECK_THROWS_AS(read_loss_matrix_csv(junk), InvalidArgument);
}
