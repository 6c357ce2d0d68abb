#include "switchbench/batching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace switchbench {

namespace {

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
}

std::size_t ceil_to_size(double x) { return static_cast<std::size_t>(std::ceil(x)); }

PolicyPtr compose_high(std::size_t rounds, std::size_t actions, std::size_t budget, double delta,
                       HighRegimeBase which) {
    const std::size_t batch = high_regime_batch(delta);
    const std::size_t meta_rounds = (rounds + batch - 1) / batch;
    PolicyPtr base = which == HighRegimeBase::bmfpl ? PolicyPtr(bmfpl(meta_rounds, actions, delta))
                                                    : PolicyPtr(bpr(meta_rounds, actions, delta));
    return budget_cap(uniform_minibatch(std::move(base), batch), budget);
}

}  // namespace

std::unique_ptr<RestartFramework> framework_restart(PolicyFactory base_factory, std::size_t quota) {
    return std::make_unique<RestartFramework>(std::move(base_factory), quota);
}

BmfplParameters bmfpl_parameters(std::size_t rounds, std::size_t actions, double delta) {
    check_delta(delta);
    const double T = static_cast<double>(rounds);
    const double log_n = std::log(static_cast<double>(actions));
    const double N = std::log(2.0 / delta);
    return {0.5 * std::sqrt(log_n * N / T), ceil_to_size(135.0 * std::sqrt(T * log_n / N))};
}

std::size_t bpr_quota(std::size_t rounds, std::size_t actions, double delta) {
    check_delta(delta);
    const double T = static_cast<double>(rounds);
    const double log_n = std::log(static_cast<double>(actions));
    return ceil_to_size(322.0 * std::sqrt(T * log_n / std::log(2.0 / delta)));
}

std::unique_ptr<RestartFramework> bmfpl(std::size_t rounds, std::size_t actions, double delta,
                                        std::optional<std::size_t> quota_override, bool record_history) {
    const auto params = bmfpl_parameters(rounds, actions, delta);
    const double eps = params.epsilon;
    return framework_restart([eps, record_history] { return make_mfpl(eps, record_history); },
                             std::max<std::size_t>(1, quota_override.value_or(params.quota)));
}

std::unique_ptr<RestartFramework> bpr(std::size_t rounds, std::size_t actions, double delta,
                                      std::optional<std::size_t> quota_override, bool record_history) {
    const std::size_t quota = bpr_quota(rounds, actions, delta);
    return framework_restart([record_history] { return make_pr(record_history); },
                             std::max<std::size_t>(1, quota_override.value_or(quota)));
}

void BudgetCap::reset(GameShape shape, RandomStream stream) {
    used_ = 0;
    last_.reset();
    base_->reset(shape, stream);
}

ActionId BudgetCap::choose(std::size_t round) {
    const ActionId proposed = base_->choose(round);
    if (!last_) {
        last_ = proposed;
    } else if (proposed != *last_ && used_ < budget_) {
        ++used_;
        last_ = proposed;
    }
    return *last_;
}

PolicyPtr budget_cap(PolicyPtr base, std::size_t budget) {
    return std::make_unique<BudgetCap>(std::move(base), budget);
}

UniformMinibatch::UniformMinibatch(PolicyPtr base, std::size_t batch_length) : base_(std::move(base)) {
    if (batch_length < 1) throw InvalidArgument("batch length B must be >= 1");
    plan_.batch_length = batch_length;
}

void UniformMinibatch::reset(GameShape shape, RandomStream stream) {
    plan_.rounds = shape.rounds;
    protocol_.reset(shape.rounds);
    accumulated_.assign(shape.actions, 0.0);
    in_batch_ = 0;
    base_->reset({plan_.meta_rounds(), shape.actions}, stream);
}

ActionId UniformMinibatch::choose(std::size_t round) {
    protocol_.on_choose(round);
    if (in_batch_ == 0) current_ = base_->choose(plan_.batch_of(round));
    return current_;
}

void UniformMinibatch::observe(std::span<const double> losses) {
    if (losses.size() != accumulated_.size()) throw InvalidArgument("loss vector width mismatch");
    const std::size_t round = protocol_.on_observe();
    for (std::size_t i = 0; i < losses.size(); ++i) accumulated_[i] += losses[i];
    ++in_batch_;
    if (round == plan_.batch_end(plan_.batch_of(round))) {
        const double inv = 1.0 / static_cast<double>(in_batch_);
        for (auto& v : accumulated_) v = std::clamp(v * inv, 0.0, 1.0);
        base_->observe(accumulated_);
        std::fill(accumulated_.begin(), accumulated_.end(), 0.0);
        in_batch_ = 0;
    }
}

PolicyPtr uniform_minibatch(PolicyPtr base, std::size_t batch_length) {
    return std::make_unique<UniformMinibatch>(std::move(base), batch_length);
}

std::size_t high_regime_batch(double delta) {
    check_delta(delta);
    return std::max<std::size_t>(1, ceil_to_size(std::log(2.0 / delta)));
}

std::size_t low_regime_batch(std::size_t rounds, std::size_t actions, std::size_t budget) {
    if (budget == 0) return rounds;
    const double S = static_cast<double>(budget);
    const double x = static_cast<double>(rounds) * std::log(static_cast<double>(actions)) / (S * S);
    return std::max<std::size_t>(1, ceil_to_size(x));
}

PolicyPtr pfe_budget_high(std::size_t rounds, std::size_t actions, std::size_t budget, double delta,
                          BudgetOptions options) {
    check_delta(delta);
    const double threshold =
        options.kappa * std::sqrt(static_cast<double>(rounds) * std::log(static_cast<double>(actions)));
    if (static_cast<double>(budget) < threshold) {
        throw RegimeError("high-switching composition needs S >= " + std::to_string(threshold) + ", got S = " +
                          std::to_string(budget));
    }
    return compose_high(rounds, actions, budget, delta, options.base);
}

PolicyPtr pfe_budget_low(std::size_t rounds, std::size_t actions, std::size_t budget, double delta,
                         BudgetOptions options) {
    check_delta(delta);
    const double S = static_cast<double>(budget);
    if (S * S <= std::log(static_cast<double>(actions))) return std::make_unique<ConstantPolicy>(ActionId{0});
    const std::size_t batch = low_regime_batch(rounds, actions, budget);
    const std::size_t meta_rounds = (rounds + batch - 1) / batch;
    return uniform_minibatch(compose_high(meta_rounds, actions, budget, delta, options.base), batch);
}

}  // namespace switchbench
