#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace switchbench {

/// Error raised for parameters outside an operation's domain.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when choose/observe calls arrive out of order.
class ProtocolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Zero-based action index. Rendered 1-based in reports.
struct ActionId {
    std::size_t value = 0;

    constexpr ActionId() = default;
    constexpr explicit ActionId(std::size_t v) : value(v) {}

    friend constexpr auto operator<=>(ActionId, ActionId) = default;
};

/// Dimensions of a game. Rounds are numbered 1..rounds in the policy protocol.
struct GameShape {
    std::size_t rounds = 0;
    std::size_t actions = 0;
};

/// Validates that every entry of a loss vector lies in [0, 1].
void validate_losses(std::span<const double> losses);

/// T x n table of losses in [0, 1], fixed before play.
class LossMatrix {
public:
    LossMatrix() = default;
    LossMatrix(std::size_t rounds, std::size_t actions, double fill = 0.0);
    LossMatrix(std::size_t rounds, std::size_t actions, std::vector<double> entries);

    std::size_t rounds() const { return rounds_; }
    std::size_t actions() const { return actions_; }
    GameShape shape() const { return {rounds_, actions_}; }

    /// Row for round `round` (1-based).
    std::span<const double> row(std::size_t round) const;
    std::span<double> row(std::size_t round);

    double at(std::size_t round, ActionId a) const { return row(round)[a.value]; }
    void set(std::size_t round, ActionId a, double v) { row(round)[a.value] = v; }

    const std::vector<double>& entries() const { return entries_; }

    const std::optional<ActionId>& best_arm() const { return best_arm_; }
    void set_best_arm(ActionId a) { best_arm_ = a; }

    /// Throws InvalidArgument unless all entries are in [0,1], T >= 1 and n >= 1.
    void validate() const;

    /// Sum of each column.
    std::vector<double> column_sums() const;

    friend bool operator==(const LossMatrix&, const LossMatrix&) = default;

private:
    std::size_t rounds_ = 0;
    std::size_t actions_ = 0;
    std::vector<double> entries_;
    std::optional<ActionId> best_arm_;
};

/// Per-round record of a played game.
class RunTrace {
public:
    struct Step {
        ActionId action;
        double incurred_loss = 0.0;
        bool is_switch = false;
        std::size_t epoch_id = 1;
    };

    /// Appends a round; the switch flag is derived from the previous action.
    void push(ActionId action, double incurred_loss, std::size_t epoch_id = 1);

    std::size_t size() const { return steps_.size(); }
    bool empty() const { return steps_.empty(); }
    const Step& operator[](std::size_t i) const { return steps_[i]; }
    const std::vector<Step>& steps() const { return steps_; }

    std::vector<ActionId> actions() const;
    double total_loss() const;

    /// Number of distinct epoch ids (epochs are contiguous by construction).
    std::size_t epochs() const { return steps_.empty() ? 0 : steps_.back().epoch_id; }

private:
    std::vector<Step> steps_;
};

/// Best fixed action in hindsight and its cumulative loss; ties go to the lowest index.
std::pair<ActionId, double> best_action_in_hindsight(const LossMatrix& losses);

/// Cumulative incurred loss minus the best fixed action's loss. May be negative.
double regret_of(const RunTrace& trace, const LossMatrix& losses);

/// Number of rounds t >= 2 whose action differs from round t-1.
std::size_t switches_of(const RunTrace& trace);

/// regret + c * switches. Requires c >= 1.
double switching_cost_objective(const RunTrace& trace, const LossMatrix& losses, double c);

/// Largest per-round spread max_i l_t(i) - min_i l_t(i).
double loss_range_M(const LossMatrix& losses);

/// Lowest-index argmin.
ActionId argmin(std::span<const double> values);

/// Recomputes switch flags from the action sequence and compares them with the stored flags.
bool switch_flags_consistent(const RunTrace& trace);

/// Tracks the choose/observe alternation shared by every policy.
class RoundProtocol {
public:
    void reset(std::size_t rounds);
    /// Must be called with the next round number (1-based).
    void on_choose(std::size_t round);
    /// Returns the round being observed.
    std::size_t on_observe();

    std::size_t completed() const { return completed_; }
    std::size_t rounds() const { return rounds_; }

private:
    std::size_t rounds_ = 0;
    std::size_t completed_ = 0;
    bool awaiting_observe_ = false;
};

}  // namespace switchbench
