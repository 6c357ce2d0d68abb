#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "switchbench/core.hpp"
#include "switchbench/experts.hpp"
#include "switchbench/random.hpp"

namespace switchbench {

/// One realized epoch of the restart framework (rounds inclusive, 1-based).
struct EpochSpan {
    std::size_t first_round = 0;
    std::size_t last_round = 0;
    std::size_t switches = 0;        // meta-algorithm switches charged to this epoch
    std::uint64_t stream_seed = 0;   // seed of the fresh instance
};

struct EpochPlan {
    std::size_t quota = 0;
    std::vector<EpochSpan> epochs;

    std::size_t count() const { return epochs.size(); }
};

/// Rounds grouped into batches of length B; the last batch may be shorter.
struct BatchPlan {
    std::size_t rounds = 0;
    std::size_t batch_length = 1;

    std::size_t meta_rounds() const { return (rounds + batch_length - 1) / batch_length; }
    std::size_t batch_of(std::size_t round) const { return (round - 1) / batch_length + 1; }
    std::size_t batch_end(std::size_t batch) const { return std::min(rounds, batch * batch_length); }
};

/// Restart framework over any policy type with the reset/choose/observe protocol.
///
/// Runs a fresh base instance and counts the meta-algorithm's switches inside the
/// current epoch. A change of action at an epoch's first round counts against that
/// epoch. When the count reaches the quota the epoch ends after that round, and a
/// fresh instance, with its own sub-stream and an empty loss history, starts next round.
template <class Policy, class Action>
class BasicRestartFramework : public Policy {
public:
    using Factory = std::function<std::unique_ptr<Policy>()>;

    BasicRestartFramework(Factory factory, std::size_t quota) : factory_(std::move(factory)), quota_(quota) {
        if (quota_ < 1) throw InvalidArgument("per-epoch switch quota S' must be >= 1");
    }

    void reset(GameShape shape, RandomStream stream) override {
        shape_ = shape;
        stream_ = stream;
        protocol_.reset(shape.rounds);
        plan_ = EpochPlan{quota_, {}};
        finished_certs_.clear();
        last_.reset();
        start_epoch(1);
    }

    Action choose(std::size_t round) override {
        protocol_.on_choose(round);
        if (pending_restart_) start_epoch(round);
        const Action a = base_->choose(round - plan_.epochs.back().first_round + 1);
        auto& epoch = plan_.epochs.back();
        epoch.last_round = round;
        if (last_ && !(*last_ == a)) ++epoch.switches;
        last_ = a;
        return a;
    }

    void observe(std::span<const double> losses) override {
        const std::size_t round = protocol_.on_observe();
        base_->observe(losses);
        if (plan_.epochs.back().switches >= quota_ && round < shape_.rounds) pending_restart_ = true;
    }

    std::size_t current_epoch() const override { return plan_.epochs.size(); }

    std::vector<FplCertificate> fpl_certificates() const override {
        auto out = finished_certs_;
        for (auto& c : base_->fpl_certificates()) out.push_back(std::move(c));
        return out;
    }

    const EpochPlan& plan() const { return plan_; }

private:
    void start_epoch(std::size_t first_round) {
        if (base_) {
            for (auto& c : base_->fpl_certificates()) finished_certs_.push_back(std::move(c));
        }
        const std::size_t index = plan_.epochs.size();
        RandomStream fresh = stream_.child(index);
        plan_.epochs.push_back({first_round, first_round, 0, fresh.seed()});
        base_ = factory_();
        GameShape remaining = shape_;
        remaining.rounds = shape_.rounds - first_round + 1;
        base_->reset(remaining, fresh);
        pending_restart_ = false;
    }

    Factory factory_;
    std::size_t quota_;
    GameShape shape_;
    RandomStream stream_;
    RoundProtocol protocol_;
    EpochPlan plan_;
    std::unique_ptr<Policy> base_;
    std::vector<FplCertificate> finished_certs_;
    std::optional<Action> last_;
    bool pending_restart_ = false;
};

using RestartFramework = BasicRestartFramework<FullInfoPolicy, ActionId>;

std::unique_ptr<RestartFramework> framework_restart(PolicyFactory base_factory, std::size_t quota);

struct BmfplParameters {
    double epsilon = 0.0;
    std::size_t quota = 0;
};

/// eps = 1/2 sqrt(ln n ln(2/delta) / T), S' = ceil(135 sqrt(T ln n / ln(2/delta))).
BmfplParameters bmfpl_parameters(std::size_t rounds, std::size_t actions, double delta);

/// S' = ceil(322 sqrt(T ln n / ln(2/delta))).
std::size_t bpr_quota(std::size_t rounds, std::size_t actions, double delta);

/// `quota_override` replaces S' (used to force multi-epoch runs at desk scale).
std::unique_ptr<RestartFramework> bmfpl(std::size_t rounds, std::size_t actions, double delta,
                                        std::optional<std::size_t> quota_override = {},
                                        bool record_history = false);
std::unique_ptr<RestartFramework> bpr(std::size_t rounds, std::size_t actions, double delta,
                                      std::optional<std::size_t> quota_override = {},
                                      bool record_history = false);

/// Follows `base` until the S-th switch, then repeats the current action. The base
/// keeps observing losses.
class BudgetCap final : public FullInfoPolicy {
public:
    BudgetCap(PolicyPtr base, std::size_t budget) : base_(std::move(base)), budget_(budget) {}

    void reset(GameShape shape, RandomStream stream) override;
    ActionId choose(std::size_t round) override;
    void observe(std::span<const double> losses) override { base_->observe(losses); }
    std::size_t current_epoch() const override { return base_->current_epoch(); }

    std::size_t switches_used() const { return used_; }

private:
    PolicyPtr base_;
    std::size_t budget_;
    std::size_t used_ = 0;
    std::optional<ActionId> last_;
};

PolicyPtr budget_cap(PolicyPtr base, std::size_t budget);

/// Plays the base's meta-round-k action throughout batch k and feeds it the batch's
/// average loss vector.
class UniformMinibatch final : public FullInfoPolicy {
public:
    UniformMinibatch(PolicyPtr base, std::size_t batch_length);

    void reset(GameShape shape, RandomStream stream) override;
    ActionId choose(std::size_t round) override;
    void observe(std::span<const double> losses) override;
    std::size_t current_epoch() const override { return base_->current_epoch(); }

    const BatchPlan& plan() const { return plan_; }

private:
    PolicyPtr base_;
    BatchPlan plan_;
    RoundProtocol protocol_;
    std::vector<double> accumulated_;
    std::size_t in_batch_ = 0;
    ActionId current_;
};

PolicyPtr uniform_minibatch(PolicyPtr base, std::size_t batch_length);

enum class HighRegimeBase { bmfpl, bpr };

struct BudgetOptions {
    double kappa = 1.0;
    HighRegimeBase base = HighRegimeBase::bmfpl;
};

/// Thrown when a regime-specific composition is asked for a budget outside its regime.
class RegimeError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Batch length ceil(ln(2/delta)) used by the high-switching composition.
std::size_t high_regime_batch(double delta);

/// Batch length ceil(T ln n / S^2) used by the low-switching composition (at least 1).
std::size_t low_regime_batch(std::size_t rounds, std::size_t actions, std::size_t budget);

/// budget_cap(uniform_minibatch(BMFPL or BPR, ceil(ln(2/delta))), S).
/// Requires S >= kappa sqrt(T ln n).
PolicyPtr pfe_budget_high(std::size_t rounds, std::size_t actions, std::size_t budget, double delta,
                          BudgetOptions options = {});

/// uniform_minibatch(pfe_budget_high on the meta-game, ceil(T ln n / S^2)).
/// Budgets with S^2 <= ln n yield a constant-action policy.
PolicyPtr pfe_budget_low(std::size_t rounds, std::size_t actions, std::size_t budget, double delta,
                         BudgetOptions options = {});

}  // namespace switchbench
