#include "switchbench/game.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace switchbench {

namespace {

void check_action(ActionId a, std::size_t n) {
    if (a.value >= n) throw ProtocolError("policy chose action " + std::to_string(a.value + 1) + " of " + std::to_string(n));
}

}  // namespace

RunTrace run_full_info(FullInfoPolicy& policy, const LossMatrix& losses, RandomStream stream) {
    policy.reset(losses.shape(), stream);
    RunTrace trace;
    for (std::size_t t = 1; t <= losses.rounds(); ++t) {
        const ActionId a = policy.choose(t);
        check_action(a, losses.actions());
        const auto row = losses.row(t);
        trace.push(a, row[a.value], policy.current_epoch());
        policy.observe(row);
    }
    return trace;
}

std::pair<RunTrace, LossMatrix> run_adaptive(FullInfoPolicy& policy, AdaptiveAdversary& adversary, GameShape shape,
                                             RandomStream stream) {
    policy.reset(shape, stream);
    adversary.reset(shape);
    LossMatrix realized(shape.rounds, shape.actions);
    RunTrace trace;
    std::vector<ActionId> played;
    played.reserve(shape.rounds);
    for (std::size_t t = 1; t <= shape.rounds; ++t) {
        // The loss vector is fixed before the player's round-t choice is revealed to it.
        const auto losses = adversary.next(t, played);
        const ActionId a = policy.choose(t);
        check_action(a, shape.actions);
        auto row = realized.row(t);
        std::copy(losses.begin(), losses.end(), row.begin());
        trace.push(a, row[a.value], policy.current_epoch());
        policy.observe(row);
        played.push_back(a);
    }
    return {std::move(trace), std::move(realized)};
}

RunTrace run_bandit(BanditPolicy& policy, const LossMatrix& losses, RandomStream stream) {
    policy.reset(losses.shape(), stream);
    RunTrace trace;
    for (std::size_t t = 1; t <= losses.rounds(); ++t) {
        const ActionId a = policy.choose(t);
        check_action(a, losses.actions());
        const double loss = losses.at(t, a);
        trace.push(a, loss, policy.current_epoch());
        policy.observe(loss);
    }
    return trace;
}

CombTrace run_combinatorial(CombPolicy& policy, const LossMatrix& losses, RandomStream stream) {
    policy.reset(losses.shape(), stream);
    CombTrace trace;
    for (std::size_t t = 1; t <= losses.rounds(); ++t) {
        Vertex v = policy.choose(t);
        if (v.dimension() != losses.actions()) throw ProtocolError("vertex dimension does not match losses");
        const auto row = losses.row(t);
        const double loss = v.dot(row);
        trace.push(std::move(v), loss, policy.current_epoch());
        policy.observe(row);
    }
    return trace;
}

SwitchingCostRun bandit_switching_cost_run(const BanditFactory& base_factory, double c, const LossMatrix& losses,
                                           RandomStream stream) {
    SwitchingCostRun out;
    out.budget = switching_cost_budget(losses.rounds(), losses.actions(), c);
    BatchedBandit policy(base_factory, out.budget);
    out.trace = run_bandit(policy, losses, stream);
    out.objective = switching_cost_objective(out.trace, losses, c);
    return out;
}

}  // namespace switchbench
