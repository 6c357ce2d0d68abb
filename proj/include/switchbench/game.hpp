#pragma once

#include <cstddef>
#include <utility>

#include "switchbench/adversaries.hpp"
#include "switchbench/bandit.hpp"
#include "switchbench/combinatorial.hpp"
#include "switchbench/core.hpp"
#include "switchbench/experts.hpp"
#include "switchbench/random.hpp"

namespace switchbench {

/// Resets `policy` with `stream`, then plays every round of `losses`: choose,
/// charge l_t(i_t), reveal the full vector.
RunTrace run_full_info(FullInfoPolicy& policy, const LossMatrix& losses, RandomStream stream);

/// Interleaved loop against an adaptive adversary; returns the realized losses too.
std::pair<RunTrace, LossMatrix> run_adaptive(FullInfoPolicy& policy, AdaptiveAdversary& adversary, GameShape shape,
                                             RandomStream stream);

/// The policy only sees its own incurred loss each round.
RunTrace run_bandit(BanditPolicy& policy, const LossMatrix& losses, RandomStream stream);

/// Linear losses l_t . v_t over a decision set; `losses` is T x d.
CombTrace run_combinatorial(CombPolicy& policy, const LossMatrix& losses, RandomStream stream);

struct SwitchingCostRun {
    double objective = 0.0;
    std::size_t budget = 0;
    RunTrace trace;
};

/// Batched bandit with S = ceil((T/c)^{2/3} n^{1/3}); reports regret + c * switches.
SwitchingCostRun bandit_switching_cost_run(const BanditFactory& base_factory, double c, const LossMatrix& losses,
                                           RandomStream stream);

}  // namespace switchbench
