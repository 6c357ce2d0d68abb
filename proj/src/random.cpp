#include "switchbench/random.hpp"

#include <cmath>
#include <numbers>

#include "switchbench/core.hpp"

namespace switchbench {

double RandomStream::exponential() {
    // 1 - U lies in (0, 1], so the log is finite.
    return -std::log1p(-uniform());
}

double RandomStream::gaussian() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RandomStream::index(std::size_t n) {
    if (n == 0) throw InvalidArgument("index range must be non-empty");
    const auto range = static_cast<std::uint64_t>(n);
    // Rejection on the largest multiple of n below 2^64.
    const std::uint64_t limit = (~std::uint64_t{0} / range) * range;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % range);
}

}  // namespace switchbench
