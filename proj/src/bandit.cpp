#include "switchbench/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace switchbench {

Exp3PParams Exp3PParams::tuned(std::size_t horizon, std::size_t arms, double delta) {
    const double T = static_cast<double>(horizon);
    const double n = static_cast<double>(arms);
    const double log_n = std::log(n);
    Exp3PParams p;
    p.horizon = horizon;
    p.arms = arms;
    p.eta = 0.95 * std::sqrt(log_n / (n * T));
    // The formula exceeds 1 for very short horizons; keep the mix a valid one.
    p.gamma = std::min(1.05 * std::sqrt(n * log_n / T), 0.99);
    p.beta = std::sqrt(std::log(n / delta) / (n * T));
    return p;
}

void Exp3PParams::validate() const {
    if (arms < 1) throw InvalidArgument("Exp3.P needs at least one arm");
    if (horizon < 1) throw InvalidArgument("Exp3.P horizon must be >= 1");
    if (!(eta >= 0.0)) throw InvalidArgument("Exp3.P eta must be >= 0");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("Exp3.P gamma must lie in [0,1)");
    if (!(beta >= 0.0)) throw InvalidArgument("Exp3.P beta must be >= 0");
}

double importance_weighted_estimate(std::span<const double> probs, ActionId played, ActionId arm, double loss,
                                    double beta) {
    const double hit = arm == played ? loss : 0.0;
    return (hit - beta) / probs[arm.value];
}

Exp3PPolicy::Exp3PPolicy(Exp3PParams params, double delta, Exp3POverrides overrides)
    : requested_(params), overrides_(overrides), delta_(delta) {
    if (requested_.horizon != 0) requested_.validate();
}

void Exp3PPolicy::reset(GameShape shape, RandomStream stream) {
    if (requested_.horizon == 0) {
        active_ = Exp3PParams::tuned(shape.rounds, shape.actions, delta_);
        if (overrides_.eta) active_.eta = *overrides_.eta;
        if (overrides_.gamma) active_.gamma = *overrides_.gamma;
        if (overrides_.beta) active_.beta = *overrides_.beta;
    } else {
        active_ = requested_;
        if (active_.arms != shape.actions) throw InvalidArgument("Exp3.P arm count does not match the game");
    }
    active_.validate();
    protocol_.reset(shape.rounds);
    rng_ = stream;
    estimates_.assign(shape.actions, 0.0);
    refresh_distribution();
}

void Exp3PPolicy::refresh_distribution() {
    const std::size_t n = estimates_.size();
    probs_.assign(n, 0.0);
    const double lowest = *std::min_element(estimates_.begin(), estimates_.end());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        probs_[i] = std::exp(-active_.eta * (estimates_[i] - lowest));
        total += probs_[i];
    }
    const double floor = active_.gamma / static_cast<double>(n);
    for (auto& p : probs_) p = (1.0 - active_.gamma) * p / total + floor;
}

ActionId Exp3PPolicy::choose(std::size_t round) {
    protocol_.on_choose(round);
    const double u = rng_.uniform();
    double acc = 0.0;
    last_ = ActionId{probs_.size() - 1};
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        if (u < acc) {
            last_ = ActionId{i};
            break;
        }
    }
    return last_;
}

void Exp3PPolicy::observe(double own_loss) {
    if (!(own_loss >= 0.0 && own_loss <= 1.0)) {
        throw InvalidArgument("observed loss " + std::to_string(own_loss) + " outside [0,1]");
    }
    protocol_.on_observe();
    for (std::size_t i = 0; i < estimates_.size(); ++i) {
        estimates_[i] += importance_weighted_estimate(probs_, last_, ActionId{i}, own_loss, active_.beta);
    }
    refresh_distribution();
}

BanditPtr make_exp3p(Exp3PParams params, double delta, Exp3POverrides overrides) {
    return std::make_unique<Exp3PPolicy>(params, delta, overrides);
}

BatchedBandit::BatchedBandit(BanditFactory base_factory, std::size_t budget)
    : factory_(std::move(base_factory)), budget_(budget) {}

void BatchedBandit::reset(GameShape shape, RandomStream stream) {
    if (budget_ < 1 || budget_ > shape.rounds) throw InvalidArgument("batched bandit needs 1 <= S <= T");
    rounds_ = shape.rounds;
    epoch_length_ = (rounds_ + budget_ - 1) / budget_;
    epochs_ = (rounds_ + epoch_length_ - 1) / epoch_length_;
    epoch_ = 0;
    in_epoch_ = 0;
    accumulated_ = 0.0;
    protocol_.reset(shape.rounds);
    base_ = factory_();
    base_->reset({epochs_, shape.actions}, stream);
}

ActionId BatchedBandit::choose(std::size_t round) {
    protocol_.on_choose(round);
    if (in_epoch_ == 0) {
        ++epoch_;
        current_ = base_->choose(epoch_);
    }
    return current_;
}

void BatchedBandit::observe(double own_loss) {
    const std::size_t round = protocol_.on_observe();
    accumulated_ += own_loss;
    ++in_epoch_;
    if (in_epoch_ == epoch_length_ || round == rounds_) {
        base_->observe(std::clamp(accumulated_ / static_cast<double>(in_epoch_), 0.0, 1.0));
        accumulated_ = 0.0;
        in_epoch_ = 0;
    }
}

BanditPtr batched_bandit(BanditFactory base_factory, std::size_t budget) {
    return std::make_unique<BatchedBandit>(std::move(base_factory), budget);
}

std::size_t switching_cost_budget(std::size_t rounds, std::size_t arms, double c) {
    if (!(c >= 1.0)) throw InvalidArgument("switching cost c must be >= 1");
    const double s = std::ceil(std::cbrt(std::pow(static_cast<double>(rounds) / c, 2.0) *
                                         static_cast<double>(arms)));
    return std::clamp<std::size_t>(static_cast<std::size_t>(s), 1, rounds);
}

void UniformRandomBandit::reset(GameShape shape, RandomStream stream) {
    protocol_.reset(shape.rounds);
    rng_ = stream;
    arms_ = shape.actions;
}

ActionId UniformRandomBandit::choose(std::size_t round) {
    protocol_.on_choose(round);
    return ActionId{rng_.index(arms_)};
}

void ConstantBandit::reset(GameShape shape, RandomStream) {
    if (arm_.value >= shape.actions) throw InvalidArgument("constant arm out of range");
    protocol_.reset(shape.rounds);
}

ActionId ConstantBandit::choose(std::size_t round) {
    protocol_.on_choose(round);
    return arm_;
}

}  // namespace switchbench
