#pragma once

#include <cstddef>
#include <span>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "switchbench/core.hpp"
#include "switchbench/random.hpp"

namespace switchbench {

/// Bandit-feedback player: after each choice it observes only its own loss.
class BanditPolicy {
public:
    virtual ~BanditPolicy() = default;

    virtual void reset(GameShape shape, RandomStream stream) = 0;
    virtual ActionId choose(std::size_t round) = 0;
    virtual void observe(double own_loss) = 0;

    virtual std::size_t current_epoch() const { return 1; }
};

using BanditPtr = std::unique_ptr<BanditPolicy>;
using BanditFactory = std::function<BanditPtr()>;

struct Exp3PParams {
    double eta = 0.0;    // learning rate
    double gamma = 0.0;  // uniform exploration mix, in [0, 1)
    double beta = 0.0;   // optimism bias
    std::size_t horizon = 0;
    std::size_t arms = 0;

    /// eta = 0.95 sqrt(ln n / (n T')), gamma = 1.05 sqrt(n ln n / T') (capped at 0.99),
    /// beta = sqrt(ln(n / delta) / (n T')).
    static Exp3PParams tuned(std::size_t horizon, std::size_t arms, double delta);

    void validate() const;
};

/// Replaces individual tuned values; unset fields keep the tuned defaults.
struct Exp3POverrides {
    std::optional<double> eta;
    std::optional<double> gamma;
    std::optional<double> beta;
};

/// Importance-weighted loss estimate for `arm` after `played` incurred `loss`
/// under distribution `probs`: (loss * 1{arm = played} - beta) / probs[arm].
double importance_weighted_estimate(std::span<const double> probs, ActionId played, ActionId arm, double loss,
                                    double beta);

/// Exp3.P in loss form: samples from (1-gamma) softmax(-eta Lhat) + gamma/n.
class Exp3PPolicy final : public BanditPolicy {
public:
    /// When `params.horizon` is zero the tuned defaults for the reset shape are used,
    /// patched by `overrides`.
    explicit Exp3PPolicy(Exp3PParams params, double delta = 0.1, Exp3POverrides overrides = {});

    void reset(GameShape shape, RandomStream stream) override;
    ActionId choose(std::size_t round) override;
    void observe(double own_loss) override;

    /// Sampling distribution for the next choice.
    const std::vector<double>& distribution() const { return probs_; }
    const Exp3PParams& params() const { return active_; }

private:
    void refresh_distribution();

    Exp3PParams requested_;
    Exp3POverrides overrides_;
    Exp3PParams active_;
    double delta_;
    RoundProtocol protocol_;
    RandomStream rng_;
    std::vector<double> estimates_;
    std::vector<double> probs_;
    ActionId last_;
};

BanditPtr make_exp3p(Exp3PParams params = {}, double delta = 0.1, Exp3POverrides overrides = {});

/// Splits T rounds into epochs of ceil(T/S) rounds; the base picks one arm per
/// epoch and observes the epoch's average own loss.
class BatchedBandit final : public BanditPolicy {
public:
    BatchedBandit(BanditFactory base_factory, std::size_t budget);

    void reset(GameShape shape, RandomStream stream) override;
    ActionId choose(std::size_t round) override;
    void observe(double own_loss) override;
    std::size_t current_epoch() const override { return epoch_; }

    std::size_t epoch_length() const { return epoch_length_; }
    std::size_t epochs() const { return epochs_; }

private:
    BanditFactory factory_;
    std::size_t budget_;
    BanditPtr base_;
    RoundProtocol protocol_;
    std::size_t rounds_ = 0;
    std::size_t epoch_length_ = 1;
    std::size_t epochs_ = 0;
    std::size_t epoch_ = 0;
    std::size_t in_epoch_ = 0;
    double accumulated_ = 0.0;
    ActionId current_;
};

BanditPtr batched_bandit(BanditFactory base_factory, std::size_t budget);

/// ceil((T/c)^{2/3} n^{1/3}), clamped to [1, T].
std::size_t switching_cost_budget(std::size_t rounds, std::size_t arms, double c);

/// Uniformly random arm every round.
class UniformRandomBandit final : public BanditPolicy {
public:
    void reset(GameShape shape, RandomStream stream) override;
    ActionId choose(std::size_t round) override;
    void observe(double) override { protocol_.on_observe(); }

private:
    RoundProtocol protocol_;
    RandomStream rng_;
    std::size_t arms_ = 0;
};

/// Always the same arm.
class ConstantBandit final : public BanditPolicy {
public:
    explicit ConstantBandit(ActionId a) : arm_(a) {}
    void reset(GameShape shape, RandomStream) override;
    ActionId choose(std::size_t round) override;
    void observe(double) override { protocol_.on_observe(); }

private:
    ActionId arm_;
    RoundProtocol protocol_;
};

}  // namespace switchbench
