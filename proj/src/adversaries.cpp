#include "switchbench/adversaries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

namespace switchbench {

LossMatrix iid_bernoulli(std::size_t rounds, std::size_t actions, RandomStream& rng) {
    LossMatrix m(rounds, actions);
    for (std::size_t t = 1; t <= rounds; ++t) {
        for (auto& v : m.row(t)) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    return m;
}

LossMatrix batched_bernoulli(std::size_t rounds, std::size_t actions, std::size_t epochs, RandomStream& rng) {
    if (epochs < 1 || epochs > rounds) throw InvalidArgument("batched Bernoulli needs 1 <= E <= T");
    const std::size_t length = (rounds + epochs - 1) / epochs;
    LossMatrix m(rounds, actions);
    std::vector<double> draw(actions);
    for (std::size_t t = 1; t <= rounds; ++t) {
        if ((t - 1) % length == 0) {
            for (auto& v : draw) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        std::copy(draw.begin(), draw.end(), m.row(t).begin());
    }
    return m;
}

std::size_t batched_bernoulli_epochs(std::size_t rounds, std::size_t actions, std::size_t budget) {
    const double S = static_cast<double>(budget);
    const double e = std::ceil(S * S / std::log(static_cast<double>(actions)));
    return std::clamp<std::size_t>(static_cast<std::size_t>(e), 1, rounds);
}

LossMatrix alternating_two_action(std::size_t rounds, std::size_t actions) {
    if (actions != 2) throw InvalidArgument("alternating adversary requires n = 2");
    LossMatrix m(rounds, 2);
    for (std::size_t t = 1; t <= rounds; ++t) {
        auto r = m.row(t);
        if (t == 1) {
            r[0] = 0.0;
            r[1] = 0.5;
        } else if (t % 2 == 0) {
            r[0] = 1.0;
            r[1] = 0.0;
        } else {
            r[0] = 0.0;
            r[1] = 1.0;
        }
    }
    return m;
}

double sd_tail_length(std::size_t rounds, double eta, double delta) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
    const double length = std::log(1.0 / (2.0 * delta)) / (2.0 * eta) + 1.0;
    return std::clamp(length, 1.0, static_cast<double>(rounds));
}

LossMatrix sd_tail_adversary(std::size_t rounds, std::size_t actions, double eta, double delta, RandomStream& rng) {
    const auto prefix = static_cast<std::size_t>(std::ceil(sd_tail_length(rounds, eta, delta)));
    const ActionId bad{rng.index(actions)};
    LossMatrix m(rounds, actions);
    for (std::size_t t = 1; t <= prefix; ++t) m.set(t, bad, 1.0);
    m.set_best_arm(bad);
    return m;
}

LossMatrix gap_bernoulli(std::size_t rounds, std::size_t actions, double gap, RandomStream& rng) {
    if (!(gap >= 0.0 && gap < 0.5)) throw InvalidArgument("eps_gap must lie in [0, 1/2)");
    const ActionId best{rng.index(actions)};
    LossMatrix m(rounds, actions);
    for (std::size_t t = 1; t <= rounds; ++t) {
        auto r = m.row(t);
        for (std::size_t i = 0; i < actions; ++i) {
            const double p = i == best.value ? 0.5 - gap : 0.5;
            r[i] = rng.bernoulli(p) ? 1.0 : 0.0;
        }
    }
    m.set_best_arm(best);
    return m;
}

std::vector<double> FollowPunisher::next(std::size_t round, std::span<const ActionId> previous) {
    std::vector<double> losses(actions_, 0.0);
    if (round > 1) losses[previous[round - 2].value] = 1.0;
    return losses;
}

std::unique_ptr<AdaptiveAdversary> follow_punisher() { return std::make_unique<FollowPunisher>(); }

unsigned dyadic_valuation(long long t) {
    if (t <= 0) throw InvalidArgument("dyadic valuation needs t >= 1");
    unsigned v = 0;
    while ((t & 1) == 0) {
        t >>= 1;
        ++v;
    }
    return v;
}

std::size_t dyadic_parent(std::size_t t) {
    return t - (std::size_t{1} << dyadic_valuation(static_cast<long long>(t)));
}

std::vector<double> mrw_walk_from_noise(std::span<const double> noise,
                                        const std::function<std::size_t(std::size_t)>& parent) {
    // w[0] = W_0 = 0.
    std::vector<double> w(noise.size() + 1, 0.0);
    for (std::size_t t = 1; t <= noise.size(); ++t) w[t] = w[parent(t)] + noise[t - 1];
    return {w.begin() + 1, w.end()};
}

std::vector<double> mrw_walk(std::size_t rounds, double sigma, RandomStream& rng) {
    std::vector<double> noise(rounds);
    for (auto& z : noise) z = sigma * rng.gaussian();
    return mrw_walk_from_noise(noise);
}

MrwParams MrwParams::from_budget(std::size_t rounds, std::size_t actions, std::size_t budget) {
    if (rounds < 2) throw InvalidArgument("MRW construction needs T >= 2");
    if (budget < 1) throw InvalidArgument("MRW construction needs S >= 1");
    const double log2T = std::log2(static_cast<double>(rounds));
    MrwParams p;
    p.sigma = 1.0 / (9.0 * log2T);
    p.epsilon = std::sqrt(static_cast<double>(actions)) /
                (54.0 * std::sqrt(static_cast<double>(budget)) * std::pow(log2T, 1.5));
    if (p.epsilon > 1.0 / 6.0) {
        p.epsilon = 1.0 / 6.0;
        p.epsilon_clamped = true;
    }
    return p;
}

double clip_unit(double x) { return std::min(std::max(x, 0.0), 1.0); }

MrwInstance mrw_adversary(std::size_t rounds, std::size_t actions, std::size_t budget, RandomStream& rng) {
    MrwInstance inst;
    inst.params = MrwParams::from_budget(rounds, actions, budget);
    const ActionId best{rng.index(actions)};
    inst.walk = mrw_walk(rounds, inst.params.sigma, rng);
    inst.losses = LossMatrix(rounds, actions);
    for (std::size_t t = 1; t <= rounds; ++t) {
        auto r = inst.losses.row(t);
        for (std::size_t i = 0; i < actions; ++i) {
            const double unclipped = inst.walk[t - 1] + 0.5 - (i == best.value ? inst.params.epsilon : 0.0);
            r[i] = clip_unit(unclipped);
            if (r[i] != unclipped) inst.clipped = true;
        }
    }
    inst.losses.set_best_arm(best);
    return inst;
}

LossMatrix with_bottom_action(const LossMatrix& losses) {
    LossMatrix out(losses.rounds(), losses.actions() + 1, 1.0);
    for (std::size_t t = 1; t <= losses.rounds(); ++t) {
        auto src = losses.row(t);
        std::copy(src.begin(), src.end(), out.row(t).begin());
    }
    if (losses.best_arm()) out.set_best_arm(*losses.best_arm());
    return out;
}

void write_loss_matrix_csv(std::ostream& out, const LossMatrix& losses) {
    char buf[32];
    for (std::size_t t = 1; t <= losses.rounds(); ++t) {
        auto r = losses.row(t);
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out << ',';
            std::snprintf(buf, sizeof buf, "%.17g", r[i]);
            out << buf;
        }
        out << '\n';
    }
}

LossMatrix read_loss_matrix_csv(std::istream& in) {
    std::vector<double> entries;
    std::size_t width = 0;
    std::size_t rounds = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t count = 0;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
                throw InvalidArgument("loss CSV row " + std::to_string(rounds + 1) + ": bad number '" + cell + "'");
            }
            entries.push_back(v);
            ++count;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (rounds == 0) width = count;
        if (count != width) throw InvalidArgument("loss CSV row " + std::to_string(rounds + 1) + " has wrong width");
        ++rounds;
    }
    LossMatrix m(rounds, width, std::move(entries));
    m.validate();
    return m;
}

}  // namespace switchbench
