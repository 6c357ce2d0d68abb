#include "switchbench/experts.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace switchbench {

namespace {

// Sub-stream key for a wrapper's own coin flips; the wrapped policy keeps the parent stream.
constexpr std::uint64_t kWrapperCoinKey = 0x5A17C0FFEEULL;

void check_width(std::span<const double> losses, std::size_t n) {
    if (losses.size() != n) {
        throw InvalidArgument("loss vector has " + std::to_string(losses.size()) + " entries, expected " +
                              std::to_string(n));
    }
    validate_losses(losses);
}

}  // namespace

PerturbationSchedule PerturbationSchedule::exponential_initial(double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("MFPL epsilon must be > 0");
    PerturbationSchedule s(Kind::exponential_initial);
    s.epsilon_ = epsilon;
    return s;
}

PerturbationSchedule PerturbationSchedule::injected(std::vector<std::vector<double>> rows) {
    PerturbationSchedule s(Kind::injected);
    s.rows_ = std::move(rows);
    return s;
}

void PerturbationSchedule::draw(std::size_t round, std::span<double> out, RandomStream& rng) const {
    switch (kind_) {
    case Kind::zero:
        std::fill(out.begin(), out.end(), 0.0);
        return;
    case Kind::exponential_initial:
        if (round == 1) {
            for (auto& v : out) v = rng.exponential() / epsilon_;
        } else {
            std::fill(out.begin(), out.end(), 0.0);
        }
        return;
    case Kind::uniform_half:
        for (auto& v : out) v = (rng.next_u64() >> 63) ? 0.5 : -0.5;
        return;
    case Kind::injected:
        if (round <= rows_.size()) {
            const auto& r = rows_[round - 1];
            if (r.size() != out.size()) throw InvalidArgument("injected perturbation row has wrong width");
            std::copy(r.begin(), r.end(), out.begin());
        } else {
            std::fill(out.begin(), out.end(), 0.0);
        }
        return;
    }
}

FplPolicy::FplPolicy(PerturbationSchedule schedule, bool record_history)
    : schedule_(std::move(schedule)), record_(record_history) {}

void FplPolicy::reset(GameShape shape, RandomStream stream) {
    rng_ = stream;
    protocol_.reset(shape.rounds);
    const std::size_t n = shape.actions;
    score_.assign(n, 0.0);
    totals_.assign(n, 0.0);
    latest_.assign(n, 0.0);
    scratch_.assign(n, 0.0);
    played_ = 0.0;
    last_played_.reset();
    history_ = {};
    add_perturbation(1);
}

void FplPolicy::add_perturbation(std::size_t round) {
    schedule_.draw(round, latest_, rng_);
    for (std::size_t i = 0; i < latest_.size(); ++i) {
        score_[i] += latest_[i];
        totals_[i] += latest_[i];
    }
    if (record_) history_.perturbations.push_back(latest_);
}

ActionId FplPolicy::choose(std::size_t round) {
    protocol_.on_choose(round);
    const ActionId leader = argmin(score_);
    played_ += latest_[leader.value];
    last_played_ = leader;
    if (record_) history_.leaders.push_back(leader);
    return leader;
}

void FplPolicy::observe(std::span<const double> losses) {
    check_width(losses, score_.size());
    const std::size_t round = protocol_.on_observe();
    for (std::size_t i = 0; i < score_.size(); ++i) score_[i] += losses[i];
    add_perturbation(round + 1);
}

std::vector<FplCertificate> FplPolicy::fpl_certificates() const {
    FplCertificate cert;
    cert.rounds = protocol_.completed();
    cert.perturbation_totals = totals_;
    const ActionId terminal = argmin(score_);
    cert.played_perturbation = played_ + latest_[terminal.value];
    cert.terminal_moved = last_played_.has_value() && *last_played_ != terminal;
    return {cert};
}

FplHistory FplPolicy::history() const {
    if (!record_) throw ProtocolError("FPL history requested but recording is disabled");
    FplHistory h = history_;
    h.leaders.push_back(argmin(score_));
    return h;
}

ActionId ftl_choose(std::span<const double> cumulative_losses) { return argmin(cumulative_losses); }

PolicyPtr make_fpl(PerturbationSchedule schedule, bool record_history) {
    return std::make_unique<FplPolicy>(std::move(schedule), record_history);
}

PolicyPtr make_ftl(bool record_history) { return make_fpl(PerturbationSchedule::zero(), record_history); }

PolicyPtr make_mfpl(double epsilon, bool record_history) {
    return make_fpl(PerturbationSchedule::exponential_initial(epsilon), record_history);
}

PolicyPtr make_pr(bool record_history) { return make_fpl(PerturbationSchedule::uniform_half(), record_history); }

SdPolicy::SdPolicy(double eta) : eta_(eta), log_keep_(std::log1p(-eta)) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("SD eta must lie in (0,1)");
}

void SdPolicy::reset(GameShape shape, RandomStream stream) {
    rng_ = stream;
    protocol_.reset(shape.rounds);
    cumulative_.assign(shape.actions, 0.0);
    last_own_loss_ = 0.0;
    current_.reset();
}

ActionId SdPolicy::sample_by_weight() {
    // w_i = (1-eta)^{cumulative_i}; normalize against the largest weight.
    const double lowest = *std::min_element(cumulative_.begin(), cumulative_.end());
    std::vector<double> w(cumulative_.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp((cumulative_[i] - lowest) * log_keep_);
        total += w[i];
    }
    const double u = rng_.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (u < acc) return ActionId{i};
    }
    return ActionId{w.size() - 1};
}

ActionId SdPolicy::choose(std::size_t round) {
    protocol_.on_choose(round);
    if (!current_) {
        current_ = ActionId{rng_.index(cumulative_.size())};
    } else {
        const double keep = std::exp(last_own_loss_ * log_keep_);
        if (!(rng_.uniform() < keep)) current_ = sample_by_weight();
    }
    return *current_;
}

void SdPolicy::observe(std::span<const double> losses) {
    check_width(losses, cumulative_.size());
    protocol_.on_observe();
    last_own_loss_ = losses[current_->value];
    for (std::size_t i = 0; i < cumulative_.size(); ++i) cumulative_[i] += losses[i];
}

PolicyPtr make_sd(double eta) { return std::make_unique<SdPolicy>(eta); }

LaggedWrapper::LaggedWrapper(PolicyPtr base, double p, std::size_t bad_rounds, std::optional<ActionId> bottom)
    : base_(std::move(base)), p_(p), bad_rounds_(bad_rounds), bottom_(bottom) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("lag probability must lie in [0,1]");
}

void LaggedWrapper::reset(GameShape shape, RandomStream stream) {
    if (bad_rounds_ > shape.rounds) throw InvalidArgument("bad_rounds exceeds the horizon T");
    resolved_bottom_ = bottom_.value_or(ActionId{shape.actions - 1});
    if (resolved_bottom_.value >= shape.actions) throw InvalidArgument("bottom action out of range");
    lagging_ = stream.child(kWrapperCoinKey).bernoulli(p_);
    base_->reset(shape, stream);
}

ActionId LaggedWrapper::choose(std::size_t round) {
    const ActionId delegated = base_->choose(round);
    return (lagging_ && round <= bad_rounds_) ? resolved_bottom_ : delegated;
}

void LaggedWrapper::observe(std::span<const double> losses) { base_->observe(losses); }

void ConstantPolicy::reset(GameShape shape, RandomStream) {
    if (action_.value >= shape.actions) throw InvalidArgument("constant action out of range");
    protocol_.reset(shape.rounds);
}

ActionId ConstantPolicy::choose(std::size_t round) {
    protocol_.on_choose(round);
    return action_;
}

void AlternatingPolicy::reset(GameShape shape, RandomStream) {
    if (shape.actions < 2) throw InvalidArgument("alternating policy needs two actions");
    protocol_.reset(shape.rounds);
}

ActionId AlternatingPolicy::choose(std::size_t round) {
    protocol_.on_choose(round);
    return ActionId{(round - 1) % 2};
}

void UniformRandomPolicy::reset(GameShape shape, RandomStream stream) {
    protocol_.reset(shape.rounds);
    rng_ = stream;
    actions_ = shape.actions;
}

ActionId UniformRandomPolicy::choose(std::size_t round) {
    protocol_.on_choose(round);
    return ActionId{rng_.index(actions_)};
}

}  // namespace switchbench
