#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "switchbench/random.hpp"
#include "switchbench/stats.hpp"

using namespace switchbench;

TEST_CASE("seed derivation is a pure function") {
    CHECK(derive_seed(7, 3, StreamRole::algorithm) == derive_seed(7, 3, StreamRole::algorithm));
    CHECK(derive_seed(7, 3, StreamRole::algorithm) != derive_seed(7, 3, StreamRole::adversary));
    CHECK(derive_seed(7, 3, StreamRole::algorithm) != derive_seed(7, 4, StreamRole::algorithm));
    CHECK(derive_seed(7, 3, StreamRole::algorithm) == mix_seed(mix_seed(7, 3), 1));
    static_assert(splitmix64(0) == 0xE220A8397B1DCDAFULL);
}

TEST_CASE("streams replay identically") {
    RandomStream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    RandomStream c(42);
    auto child1 = c.child(5);
    c.next_u64();
    auto child2 = c.child(5);
    CHECK(child1.next_u64() == child2.next_u64());
}

TEST_CASE("child streams are distinct") {
    RandomStream root(9);
    std::set<std::uint64_t> firsts;
    for (std::uint64_t k = 0; k < 1000; ++k) firsts.insert(root.child(k).next_u64());
    CHECK(firsts.size() == 1000);
}

TEST_CASE("uniform lies in [0,1)") {
    RandomStream r(1);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int N = 200000;
    for (int i = 0; i < N; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(std::abs(sum / N - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / N));
}

TEST_CASE("exponential moments") {
    RandomStream r(2);
    std::vector<double> x(200000);
    for (auto& v : x) v = r.exponential();
    const double m = mean_of(x);
    CHECK(std::abs(m - 1.0) < 3.0 * standard_error(x));
    double above = 0;
    for (double v : x) above += v > 2.0;
    const double p = above / x.size();
    CHECK(std::abs(p - std::exp(-2.0)) < 3.0 * frequency_standard_error(std::exp(-2.0), x.size()));
}

TEST_CASE("gaussian moments") {
    RandomStream r(3);
    const int N = 100000;
    std::vector<double> x(N);
    for (auto& v : x) v = r.gaussian();
    const double m = mean_of(x);
    double var = 0;
    for (double v : x) var += (v - m) * (v - m);
    var /= N - 1;
    CHECK(std::abs(m) < 3.0 * std::sqrt(1.0 / N));
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("index is uniform and in range") {
    RandomStream r(4);
    const std::size_t n = 7;
    std::vector<double> counts(n, 0.0);
    const int N = 70000;
    for (int i = 0; i < N; ++i) {
        const auto k = r.index(n);
        REQUIRE(k < n);
        counts[k] += 1;
    }
    // chi-square, 6 dof, 1% critical value 16.81
    double chi = 0.0;
    for (double c : counts) chi += (c - N / 7.0) * (c - N / 7.0) / (N / 7.0);
    CHECK(chi < 16.81);
    CHECK(r.index(1) == 0);
}

TEST_CASE("bernoulli extremes") {
    RandomStream r(5);
    for (int i = 0; i < 100; ++i) {
        CHECK_FALSE(r.bernoulli(0.0));
        CHECK(r.bernoulli(1.0));
    }
}
