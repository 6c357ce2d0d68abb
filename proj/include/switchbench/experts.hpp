#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "switchbench/core.hpp"
#include "switchbench/random.hpp"

namespace switchbench {

/// Per-epoch data needed to evaluate the FPL regret decomposition for one
/// FPL instance that played `rounds` rounds.
struct FplCertificate {
    std::size_t rounds = 0;
    /// Sum over t = 1..rounds+1 of P_t(i), per coordinate.
    std::vector<double> perturbation_totals;
    /// Sum over t = 1..rounds+1 of the perturbation of the leader at t
    /// (the leader at rounds+1 is the terminal, never-played one).
    double played_perturbation = 0.0;
    /// Terminal leader differs from the last played leader.
    bool terminal_moved = false;
};

/// Full realized schedule of one FPL instance, when recording is enabled.
struct FplHistory {
    /// Rows P_1 .. P_{L+1}.
    std::vector<std::vector<double>> perturbations;
    /// Leaders i_1 .. i_{L+1}.
    std::vector<ActionId> leaders;
};

/// Full-information player. The harness calls reset once, then choose(t) and
/// observe(l_t) alternately for t = 1..T.
class FullInfoPolicy {
public:
    virtual ~FullInfoPolicy() = default;

    virtual void reset(GameShape shape, RandomStream stream) = 0;
    virtual ActionId choose(std::size_t round) = 0;
    virtual void observe(std::span<const double> losses) = 0;

    /// Epoch of the most recent choice (1 unless the policy restarts itself).
    virtual std::size_t current_epoch() const { return 1; }

    /// One certificate per epoch for FPL-family policies; empty otherwise.
    virtual std::vector<FplCertificate> fpl_certificates() const { return {}; }
};

using PolicyPtr = std::unique_ptr<FullInfoPolicy>;
using PolicyFactory = std::function<PolicyPtr()>;

/// Generator of the perturbations P_t(i), t = 1..T+1.
class PerturbationSchedule {
public:
    enum class Kind { zero, exponential_initial, uniform_half, injected };

    static PerturbationSchedule zero() { return PerturbationSchedule(Kind::zero); }
    /// P_1(i) = R(i)/epsilon with R(i) ~ Exp(1); P_t = 0 for t > 1.
    static PerturbationSchedule exponential_initial(double epsilon);
    /// P_t(i) uniform on {-1/2, +1/2} for every t.
    static PerturbationSchedule uniform_half() { return PerturbationSchedule(Kind::uniform_half); }
    /// Fixed rows P_1, P_2, ...; rows past the end are zero.
    static PerturbationSchedule injected(std::vector<std::vector<double>> rows);

    Kind kind() const { return kind_; }
    double epsilon() const { return epsilon_; }

    /// Writes P_round into `out`.
    void draw(std::size_t round, std::span<double> out, RandomStream& rng) const;

private:
    explicit PerturbationSchedule(Kind k) : kind_(k) {}

    Kind kind_;
    double epsilon_ = 0.0;
    std::vector<std::vector<double>> rows_;
};

/// Follow the perturbed leader: at round t plays
/// argmin_i sum_{s=0}^{t-1} (l_s(i) + P_{s+1}(i)), with l_0 = 0.
class FplPolicy final : public FullInfoPolicy {
public:
    explicit FplPolicy(PerturbationSchedule schedule, bool record_history = false);

    void reset(GameShape shape, RandomStream stream) override;
    ActionId choose(std::size_t round) override;
    void observe(std::span<const double> losses) override;
    std::vector<FplCertificate> fpl_certificates() const override;

    const PerturbationSchedule& schedule() const { return schedule_; }
    /// Recorded history including the terminal leader; requires record_history.
    FplHistory history() const;

private:
    void add_perturbation(std::size_t round);

    PerturbationSchedule schedule_;
    bool record_;
    RoundProtocol protocol_;
    RandomStream rng_;
    std::vector<double> score_;
    std::vector<double> scratch_;
    std::vector<double> totals_;
    std::vector<double> latest_;  // P of the most recently drawn round
    double played_ = 0.0;
    std::optional<ActionId> last_played_;
    FplHistory history_;
};

/// Lowest-index argmin of cumulative losses.
ActionId ftl_choose(std::span<const double> cumulative_losses);

PolicyPtr make_fpl(PerturbationSchedule schedule, bool record_history = false);
PolicyPtr make_ftl(bool record_history = false);
PolicyPtr make_mfpl(double epsilon, bool record_history = false);
PolicyPtr make_pr(bool record_history = false);

/// Shrinking Dartboard: weights (1-eta)^{cumulative loss}; keeps the previous
/// action with probability (1-eta)^{its last loss}, otherwise resamples by weight.
class SdPolicy final : public FullInfoPolicy {
public:
    explicit SdPolicy(double eta);

    void reset(GameShape shape, RandomStream stream) override;
    ActionId choose(std::size_t round) override;
    void observe(std::span<const double> losses) override;

    double eta() const { return eta_; }

private:
    ActionId sample_by_weight();

    double eta_;
    double log_keep_;
    RoundProtocol protocol_;
    RandomStream rng_;
    std::vector<double> cumulative_;
    double last_own_loss_ = 0.0;
    std::optional<ActionId> current_;
};

PolicyPtr make_sd(double eta);

/// With probability p plays `bottom` for the first bad_rounds rounds, then
/// follows `base`; otherwise follows `base` throughout. The base observes every round.
class LaggedWrapper final : public FullInfoPolicy {
public:
    LaggedWrapper(PolicyPtr base, double p, std::size_t bad_rounds, std::optional<ActionId> bottom = {});

    void reset(GameShape shape, RandomStream stream) override;
    ActionId choose(std::size_t round) override;
    void observe(std::span<const double> losses) override;

    bool lagging() const { return lagging_; }

private:
    PolicyPtr base_;
    double p_;
    std::size_t bad_rounds_;
    std::optional<ActionId> bottom_;
    ActionId resolved_bottom_;
    bool lagging_ = false;
};

/// Always plays one action.
class ConstantPolicy final : public FullInfoPolicy {
public:
    explicit ConstantPolicy(ActionId a) : action_(a) {}
    void reset(GameShape shape, RandomStream) override;
    ActionId choose(std::size_t round) override;
    void observe(std::span<const double>) override { protocol_.on_observe(); }

private:
    ActionId action_;
    RoundProtocol protocol_;
};

/// Plays actions 1, 2, 1, 2, ... regardless of losses.
class AlternatingPolicy final : public FullInfoPolicy {
public:
    void reset(GameShape shape, RandomStream) override;
    ActionId choose(std::size_t round) override;
    void observe(std::span<const double>) override { protocol_.on_observe(); }

private:
    RoundProtocol protocol_;
};

/// Plays a fresh uniformly random action every round.
class UniformRandomPolicy final : public FullInfoPolicy {
public:
    void reset(GameShape shape, RandomStream stream) override;
    ActionId choose(std::size_t round) override;
    void observe(std::span<const double>) override { protocol_.on_observe(); }

private:
    RoundProtocol protocol_;
    RandomStream rng_;
    std::size_t actions_ = 0;
};

}  // namespace switchbench
