#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "switchbench/core.hpp"
#include "switchbench/random.hpp"

namespace switchbench {

/// Every entry independently Bernoulli(1/2).
LossMatrix iid_bernoulli(std::size_t rounds, std::size_t actions, RandomStream& rng);

/// E epochs of length ceil(T/E) (last one truncated); one Bernoulli(1/2) draw per
/// epoch and action, repeated across the epoch.
LossMatrix batched_bernoulli(std::size_t rounds, std::size_t actions, std::size_t epochs, RandomStream& rng);

/// Epoch count ceil(S^2 / ln n), clamped to [1, T].
std::size_t batched_bernoulli_epochs(std::size_t rounds, std::size_t actions, std::size_t budget);

/// Two actions: round 1 = (0, 1/2), even rounds = (1, 0), odd rounds > 1 = (0, 1).
LossMatrix alternating_two_action(std::size_t rounds, std::size_t actions = 2);

/// Length of the bad prefix, ln(1/(2 delta)) / (2 eta) + 1, capped at T.
double sd_tail_length(std::size_t rounds, double eta, double delta);

/// Loss 1 on a uniformly drawn arm i* for the first ceil(T') rounds, 0 elsewhere.
/// best_arm metadata holds i* (the bad arm).
LossMatrix sd_tail_adversary(std::size_t rounds, std::size_t actions, double eta, double delta, RandomStream& rng);

/// Arm i* (uniform) has Bernoulli(1/2 - gap) losses; the others Bernoulli(1/2).
LossMatrix gap_bernoulli(std::size_t rounds, std::size_t actions, double gap, RandomStream& rng);

/// Adversary that sees the player's past actions.
class AdaptiveAdversary {
public:
    virtual ~AdaptiveAdversary() = default;
    virtual void reset(GameShape shape) = 0;
    /// Loss vector for `round` given the actions of rounds 1..round-1.
    virtual std::vector<double> next(std::size_t round, std::span<const ActionId> previous) = 0;
};

/// Round 1 all zero; afterwards loss 1 on the player's previous action.
class FollowPunisher final : public AdaptiveAdversary {
public:
    void reset(GameShape shape) override { actions_ = shape.actions; }
    std::vector<double> next(std::size_t round, std::span<const ActionId> previous) override;

private:
    std::size_t actions_ = 0;
};

std::unique_ptr<AdaptiveAdversary> follow_punisher();

/// Largest i with 2^i dividing t.
unsigned dyadic_valuation(long long t);

/// Dyadic parent p(t) = t - 2^{valuation(t)}.
std::size_t dyadic_parent(std::size_t t);

/// W_0 = 0, W_t = W_{parent(t)} + Z_t for t = 1..|noise|, with Z_{t} = noise[t-1].
/// Returns W_1..W_T.
std::vector<double> mrw_walk_from_noise(std::span<const double> noise,
                                        const std::function<std::size_t(std::size_t)>& parent = dyadic_parent);

/// Walk with Z_t ~ N(0, sigma^2).
std::vector<double> mrw_walk(std::size_t rounds, double sigma, RandomStream& rng);

struct MrwParams {
    double epsilon = 0.0;
    double sigma = 0.0;
    bool epsilon_clamped = false;

    /// epsilon = sqrt(n) / (54 sqrt(S) (log2 T)^{3/2}), sigma = 1 / (9 log2 T);
    /// epsilon is clamped to 1/6 when the formula exceeds it.
    static MrwParams from_budget(std::size_t rounds, std::size_t actions, std::size_t budget);
};

struct MrwInstance {
    LossMatrix losses;             // clipped, best_arm = i*
    std::vector<double> walk;      // W_1..W_T
    MrwParams params;
    bool clipped = false;          // some entry was clipped
};

double clip_unit(double x);

/// l_t(i) = clip(W_t + 1/2 - epsilon 1{i = i*}).
MrwInstance mrw_adversary(std::size_t rounds, std::size_t actions, std::size_t budget, RandomStream& rng);

/// Appends a column that is always 1 (the designated worst action).
LossMatrix with_bottom_action(const LossMatrix& losses);

/// CSV with T rows and n comma-separated decimal columns; no header.
void write_loss_matrix_csv(std::ostream& out, const LossMatrix& losses);
LossMatrix read_loss_matrix_csv(std::istream& in);

}  // namespace switchbench
