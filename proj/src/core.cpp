#include "switchbench/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace switchbench {

void validate_losses(std::span<const double> losses) {
    for (std::size_t i = 0; i < losses.size(); ++i) {
        const double v = losses[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidArgument("loss entry " + std::to_string(i + 1) + " = " + std::to_string(v) +
                                  " outside [0,1]");
        }
    }
}

LossMatrix::LossMatrix(std::size_t rounds, std::size_t actions, double fill)
    : rounds_(rounds), actions_(actions), entries_(rounds * actions, fill) {}

LossMatrix::LossMatrix(std::size_t rounds, std::size_t actions, std::vector<double> entries)
    : rounds_(rounds), actions_(actions), entries_(std::move(entries)) {
    if (entries_.size() != rounds_ * actions_) {
        throw InvalidArgument("loss matrix entry count does not match T x n");
    }
}

std::span<const double> LossMatrix::row(std::size_t round) const {
    return {entries_.data() + (round - 1) * actions_, actions_};
}

std::span<double> LossMatrix::row(std::size_t round) {
    return {entries_.data() + (round - 1) * actions_, actions_};
}

void LossMatrix::validate() const {
    if (rounds_ < 1) throw InvalidArgument("loss matrix needs T >= 1");
    if (actions_ < 1) throw InvalidArgument("loss matrix needs n >= 1");
    validate_losses(entries_);
    if (best_arm_ && best_arm_->value >= actions_) throw InvalidArgument("best_arm out of range");
}

std::vector<double> LossMatrix::column_sums() const {
    std::vector<double> sums(actions_, 0.0);
    for (std::size_t t = 1; t <= rounds_; ++t) {
        auto r = row(t);
        for (std::size_t i = 0; i < actions_; ++i) sums[i] += r[i];
    }
    return sums;
}

void RunTrace::push(ActionId action, double incurred_loss, std::size_t epoch_id) {
    const bool sw = !steps_.empty() && steps_.back().action != action;
    steps_.push_back({action, incurred_loss, sw, epoch_id});
}

std::vector<ActionId> RunTrace::actions() const {
    std::vector<ActionId> out;
    out.reserve(steps_.size());
    for (const auto& s : steps_) out.push_back(s.action);
    return out;
}

double RunTrace::total_loss() const {
    double total = 0.0;
    for (const auto& s : steps_) total += s.incurred_loss;
    return total;
}

ActionId argmin(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[best]) best = i;
    }
    return ActionId{best};
}

std::pair<ActionId, double> best_action_in_hindsight(const LossMatrix& losses) {
    const auto sums = losses.column_sums();
    const ActionId a = argmin(sums);
    return {a, sums[a.value]};
}

double regret_of(const RunTrace& trace, const LossMatrix& losses) {
    if (trace.size() != losses.rounds()) {
        throw InvalidArgument("trace length " + std::to_string(trace.size()) + " != T = " +
                              std::to_string(losses.rounds()));
    }
    return trace.total_loss() - best_action_in_hindsight(losses).second;
}

std::size_t switches_of(const RunTrace& trace) {
    std::size_t count = 0;
    for (std::size_t t = 1; t < trace.size(); ++t) {
        if (trace[t].action != trace[t - 1].action) ++count;
    }
    return count;
}

double switching_cost_objective(const RunTrace& trace, const LossMatrix& losses, double c) {
    if (!(c >= 1.0)) throw InvalidArgument("switching cost c must be >= 1");
    return regret_of(trace, losses) + c * static_cast<double>(switches_of(trace));
}

double loss_range_M(const LossMatrix& losses) {
    double m = 0.0;
    for (std::size_t t = 1; t <= losses.rounds(); ++t) {
        auto r = losses.row(t);
        auto [lo, hi] = std::minmax_element(r.begin(), r.end());
        m = std::max(m, *hi - *lo);
    }
    return m;
}

bool switch_flags_consistent(const RunTrace& trace) {
    for (std::size_t t = 0; t < trace.size(); ++t) {
        const bool expected = t > 0 && trace[t].action != trace[t - 1].action;
        if (trace[t].is_switch != expected) return false;
    }
    return true;
}

void RoundProtocol::reset(std::size_t rounds) {
    rounds_ = rounds;
    completed_ = 0;
    awaiting_observe_ = false;
}

void RoundProtocol::on_choose(std::size_t round) {
    if (awaiting_observe_) throw ProtocolError("choose called twice without observe");
    if (round != completed_ + 1) {
        throw ProtocolError("choose called for round " + std::to_string(round) + ", expected " +
                            std::to_string(completed_ + 1));
    }
    if (round > rounds_) throw ProtocolError("choose called past the horizon");
    awaiting_observe_ = true;
}

std::size_t RoundProtocol::on_observe() {
    if (!awaiting_observe_) throw ProtocolError("observe called before choose");
    awaiting_observe_ = false;
    return ++completed_;
}

}  // namespace switchbench
