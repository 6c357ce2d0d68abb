#include "switchbench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "switchbench/adversaries.hpp"
#include "switchbench/bandit.hpp"
#include "switchbench/batching.hpp"
#include "switchbench/combinatorial.hpp"
#include "switchbench/experts.hpp"
#include "switchbench/game.hpp"
#include "switchbench/random.hpp"

namespace switchbench {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

// Shortest round-trip decimal form.
std::string num(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_real(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ConfigError(key, "expected a number, got '" + text + "'");
    }
    return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    const double v = parse_real(key, text);
    if (v < 0.0 || v != std::floor(v) || v > 9.0e15) {
        throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
    }
    return static_cast<std::size_t>(v);
}

std::uint64_t parse_seed(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key, "expected a 64-bit unsigned integer, got '" + text + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_real(key, item));
    }
    return out;
}

// ---- registry ----------------------------------------------------------------

const ParamSpec kDelta{"delta", true, "failure probability in (0, 1/2)"};
const ParamSpec kBudget{"S", true, "switching budget, S <= T"};
const ParamSpec kExp3Eta{"alg.eta", false, "learning rate (default tuned)"};
const ParamSpec kExp3Gamma{"alg.gamma", false, "exploration mix (default tuned)"};
const ParamSpec kExp3Beta{"alg.beta", false, "bias (default tuned)"};

AlgorithmInfo alg(std::string id, GameKind kind, std::string summary, std::vector<ParamSpec> params) {
    AlgorithmInfo a;
    a.id = std::move(id);
    a.kind = kind;
    a.summary = std::move(summary);
    a.params = std::move(params);
    return a;
}

AdversaryInfo adv(std::string id, std::string summary, std::vector<ParamSpec> params, bool adaptive = false,
                  bool bandit_ok = true, bool comb_ok = true) {
    AdversaryInfo a;
    a.id = std::move(id);
    a.summary = std::move(summary);
    a.params = std::move(params);
    a.adaptive = adaptive;
    a.bandit_ok = bandit_ok;
    a.combinatorial_ok = comb_ok;
    return a;
}

const AlgorithmInfo* find_algorithm(const std::string& id) {
    for (const auto& a : algorithm_registry()) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

const AdversaryInfo* find_adversary(const std::string& id) {
    for (const auto& a : adversary_registry()) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

// ---- typed view of a config ------------------------------------------------------

struct Prepared {
    GameConfig config;
    const AlgorithmInfo* algorithm = nullptr;
    const AdversaryInfo* adversary = nullptr;
    std::optional<DecisionSet> set;
    std::optional<LossMatrix> file_losses;
};

std::optional<std::string> lookup(const std::map<std::string, std::string>& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) return std::nullopt;
    return it->second;
}

double alg_real(const GameConfig& c, const std::string& name, double fallback) {
    auto v = lookup(c.alg, name);
    return v ? parse_real("alg." + name, *v) : fallback;
}

std::optional<double> alg_opt(const GameConfig& c, const std::string& name) {
    auto v = lookup(c.alg, name);
    if (!v) return std::nullopt;
    return parse_real("alg." + name, *v);
}

std::optional<std::size_t> alg_count(const GameConfig& c, const std::string& name) {
    auto v = lookup(c.alg, name);
    if (!v) return std::nullopt;
    return parse_count("alg." + name, *v);
}

double adv_real(const GameConfig& c, const std::string& name) {
    return parse_real("adv." + name, c.adv.at(name));
}

double default_epsilon(const GameConfig& c) {
    const double ln_n = c.n > 1 ? std::log(static_cast<double>(c.n)) : 1.0;
    return std::min(1.0, std::sqrt(ln_n / static_cast<double>(c.T)));
}

BudgetOptions budget_options(const GameConfig& c) {
    BudgetOptions o;
    o.kappa = alg_real(c, "kappa", 1.0);
    if (auto base = lookup(c.alg, "base")) {
        if (*base == "bmfpl") {
            o.base = HighRegimeBase::bmfpl;
        } else if (*base == "bpr") {
            o.base = HighRegimeBase::bpr;
        } else {
            throw ConfigError("alg.base", "expected bmfpl or bpr, got '" + *base + "'");
        }
    }
    return o;
}

PolicyPtr make_full_info(const GameConfig& c) {
    const std::string& id = c.algorithm;
    if (id == "ftl") return make_ftl();
    if (id == "mfpl") return make_mfpl(alg_real(c, "eps", default_epsilon(c)));
    if (id == "pr") return make_pr();
    if (id == "sd") return make_sd(alg_real(c, "eta", std::min(0.5, default_epsilon(c))));
    if (id == "bmfpl") return bmfpl(c.T, c.n, *c.delta, alg_count(c, "quota"));
    if (id == "bpr") return bpr(c.T, c.n, *c.delta, alg_count(c, "quota"));
    if (id == "lagged_mfpl") {
        std::optional<ActionId> bottom;
        if (auto b = alg_count(c, "bottom")) {
            if (*b < 1) throw ConfigError("alg.bottom", "actions are numbered from 1");
            bottom = ActionId{*b - 1};
        }
        return std::make_unique<LaggedWrapper>(make_mfpl(alg_real(c, "eps", default_epsilon(c))),
                                               alg_real(c, "p", 0.0), *alg_count(c, "bad_rounds"), bottom);
    }
    if (id == "capped_ftl") return budget_cap(make_ftl(), *c.S);
    if (id == "capped_mfpl") return budget_cap(make_mfpl(alg_real(c, "eps", default_epsilon(c))), *c.S);
    if (id == "pfe_budget_high") return pfe_budget_high(c.T, c.n, *c.S, *c.delta, budget_options(c));
    if (id == "pfe_budget_low") return pfe_budget_low(c.T, c.n, *c.S, *c.delta, budget_options(c));
    if (id == "pfe_budget") {
        const auto o = budget_options(c);
        const double threshold = o.kappa * std::sqrt(static_cast<double>(c.T) * std::log(static_cast<double>(c.n)));
        return static_cast<double>(*c.S) >= threshold ? pfe_budget_high(c.T, c.n, *c.S, *c.delta, o)
                                                       : pfe_budget_low(c.T, c.n, *c.S, *c.delta, o);
    }
    if (id == "uniform_random") return std::make_unique<UniformRandomPolicy>();
    if (id == "constant") {
        const std::size_t a = alg_count(c, "action").value_or(1);
        if (a < 1) throw ConfigError("alg.action", "actions are numbered from 1");
        return std::make_unique<ConstantPolicy>(ActionId{a - 1});
    }
    throw ConfigError("algorithm", "'" + id + "' is not a full-information algorithm");
}

BanditFactory exp3p_factory(const GameConfig& c) {
    Exp3POverrides o{alg_opt(c, "eta"), alg_opt(c, "gamma"), alg_opt(c, "beta")};
    const double delta = *c.delta;
    return [o, delta] { return make_exp3p({}, delta, o); };
}

BanditPtr make_bandit(const GameConfig& c) {
    const std::string& id = c.algorithm;
    if (id == "exp3p") return exp3p_factory(c)();
    if (id == "batched_exp3p") return batched_bandit(exp3p_factory(c), *c.S);
    if (id == "bandit_switching_cost") {
        return batched_bandit(exp3p_factory(c), switching_cost_budget(c.T, c.n, *c.c));
    }
    if (id == "uniform_random_bandit") return std::make_unique<UniformRandomBandit>();
    throw ConfigError("algorithm", "'" + id + "' is not a bandit algorithm");
}

CombPolicyPtr make_comb(const Prepared& p) {
    const GameConfig& c = p.config;
    const std::optional<double> eta = alg_opt(c, "eta");
    if (c.algorithm == "cpr") return std::make_unique<CprPolicy>(*p.set, eta.value_or(cpr_default_eta(c.n)));
    if (c.algorithm == "bcpr") return bcpr(*p.set, c.T, *c.delta, c.c.value_or(1.0), eta, alg_count(c, "quota"));
    throw ConfigError("algorithm", "'" + c.algorithm + "' is not a combinatorial algorithm");
}

LossMatrix make_losses(const Prepared& p, RandomStream& rng) {
    const GameConfig& c = p.config;
    const std::string& id = c.adversary;
    if (id == "iid_bernoulli") return iid_bernoulli(c.T, c.n, rng);
    if (id == "batched_bernoulli") {
        std::size_t epochs = 0;
        if (auto e = lookup(c.adv, "epochs")) {
            epochs = parse_count("adv.epochs", *e);
        } else {
            epochs = batched_bernoulli_epochs(c.T, c.n, *c.S);
        }
        return batched_bernoulli(c.T, c.n, epochs, rng);
    }
    if (id == "alternating") return alternating_two_action(c.T, c.n);
    if (id == "sd_tail") return sd_tail_adversary(c.T, c.n, adv_real(c, "eta"), *c.delta, rng);
    if (id == "mrw") return mrw_adversary(c.T, c.n, *c.S, rng).losses;
    if (id == "gap_bernoulli") return gap_bernoulli(c.T, c.n, adv_real(c, "gap"), rng);
    if (id == "loss_file") return *p.file_losses;
    throw ConfigError("adversary", "'" + id + "' is not an oblivious adversary");
}

std::unique_ptr<AdaptiveAdversary> make_adaptive(const GameConfig& c) {
    if (c.adversary == "follow_punisher") return follow_punisher();
    throw ConfigError("adversary", "'" + c.adversary + "' is not adaptive");
}

bool declared(const RegistryEntry& e, const std::string& key) {
    return std::any_of(e.params.begin(), e.params.end(), [&](const ParamSpec& p) { return p.key == key; });
}

Prepared prepare(const GameConfig& config) {
    Prepared p;
    p.config = config;
    const GameConfig& c = p.config;
    if (c.algorithm.empty()) throw ConfigError("algorithm", "missing");
    if (c.adversary.empty()) throw ConfigError("adversary", "missing");
    p.algorithm = find_algorithm(c.algorithm);
    if (!p.algorithm) throw ConfigError("algorithm", "unknown algorithm '" + c.algorithm + "'");
    p.adversary = find_adversary(c.adversary);
    if (!p.adversary) throw ConfigError("adversary", "unknown adversary '" + c.adversary + "'");
    if (c.T < 1) throw ConfigError("T", "must be >= 1");
    if (c.n < 1) throw ConfigError("n", "must be >= 1");
    if (c.replications < 1) throw ConfigError("replications", "must be >= 1");
    if (c.delta && !(*c.delta > 0.0 && *c.delta < 0.5)) throw ConfigError("delta", "must lie in (0, 1/2)");
    if (c.S && *c.S > c.T) throw ConfigError("S", "must satisfy S <= T");
    if (c.c && !(*c.c >= 1.0)) throw ConfigError("c", "must be >= 1");

    const GameKind kind = p.algorithm->kind;
    if (p.adversary->adaptive && kind != GameKind::full_info) {
        throw ConfigError("adversary", "adaptive adversaries need a full-information algorithm");
    }
    if (kind == GameKind::bandit && !p.adversary->bandit_ok) {
        throw ConfigError("adversary", "'" + c.adversary + "' does not support bandit games");
    }
    if (kind == GameKind::combinatorial && !p.adversary->combinatorial_ok) {
        throw ConfigError("adversary", "'" + c.adversary + "' does not support combinatorial games");
    }

    // Exactly the declared fields: required ones present, nothing undeclared.
    auto present = [&](const std::string& key) {
        if (key == "S") return c.S.has_value();
        if (key == "c") return c.c.has_value();
        if (key == "delta") return c.delta.has_value();
        if (key == "decision_set") return c.decision_set.has_value();
        if (key.rfind("alg.", 0) == 0) return c.alg.count(key.substr(4)) > 0;
        if (key.rfind("adv.", 0) == 0) return c.adv.count(key.substr(4)) > 0;
        return false;
    };
    for (const RegistryEntry* e : {static_cast<const RegistryEntry*>(p.algorithm),
                                   static_cast<const RegistryEntry*>(p.adversary)}) {
        for (const auto& spec : e->params) {
            if (spec.required && !present(spec.key)) {
                throw ConfigError(spec.key, "required by '" + e->id + "' but missing");
            }
        }
    }
    std::vector<std::string> given;
    if (c.S) given.push_back("S");
    if (c.c) given.push_back("c");
    if (c.delta) given.push_back("delta");
    if (c.decision_set) given.push_back("decision_set");
    for (const auto& [k, v] : c.alg) given.push_back("alg." + k);
    for (const auto& [k, v] : c.adv) given.push_back("adv." + k);
    for (const auto& key : given) {
        if (!declared(*p.algorithm, key) && !declared(*p.adversary, key)) {
            throw ConfigError(key, "not used by algorithm '" + c.algorithm + "' or adversary '" + c.adversary + "'");
        }
    }

    if (c.adversary == "alternating" && c.n != 2) throw ConfigError("n", "the alternating adversary needs n = 2");
    if (c.adversary == "batched_bernoulli" && !c.S && !c.adv.count("epochs")) {
        throw ConfigError("S", "batched_bernoulli needs S or adv.epochs");
    }
    if (c.adversary == "mrw" && c.T < 2) throw ConfigError("T", "mrw needs T >= 2");
    if (c.adversary == "loss_file") {
        const std::string path = c.adv.at("path");
        std::ifstream in(path);
        if (!in) throw IoError("cannot read loss file '" + path + "'");
        try {
            p.file_losses = read_loss_matrix_csv(in);
        } catch (const InvalidArgument& e) {
            throw ConfigError("adv.path", e.what());
        }
        if (p.file_losses->rounds() != c.T || p.file_losses->actions() != c.n) {
            throw ConfigError("adv.path", "loss file shape does not match T and n");
        }
    }

    if (kind == GameKind::combinatorial) {
        if (c.decision_set) {
            std::ifstream in(*c.decision_set);
            if (!in) throw IoError("cannot read decision set '" + *c.decision_set + "'");
            try {
                p.set = read_decision_set(in);
            } catch (const InvalidArgument& e) {
                throw ConfigError("decision_set", e.what());
            }
            if (c.alg.count("m")) throw ConfigError("alg.m", "give either alg.m or decision_set, not both");
        } else {
            const auto m = alg_count(c, "m");
            if (!m) throw ConfigError("alg.m", "required unless decision_set is given");
            if (*m < 1 || *m > c.n) throw ConfigError("alg.m", "must satisfy 1 <= m <= n");
            p.set = DecisionSet::top_m(c.n, *m);
        }
        if (p.set->dimension() != c.n) throw ConfigError("decision_set", "dimension must equal n");
    }

    // Build one instance so parameter errors surface before any run.
    try {
        GameShape shape{c.T, c.n};
        RandomStream probe(0);
        switch (kind) {
            case GameKind::full_info: make_full_info(c)->reset(shape, probe); break;
            case GameKind::bandit: make_bandit(c)->reset(shape, probe); break;
            case GameKind::combinatorial: make_comb(p)->reset(shape, probe); break;
        }
        if (!p.adversary->adaptive && c.adversary != "loss_file") {
            RandomStream rng(0);
            (void)make_losses(p, rng);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const RegimeError& e) {
        throw ConfigError("S", e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(c.algorithm + "/" + c.adversary, e.what());
    }
    return p;
}

RunRow run_prepared(const Prepared& p, std::size_t replication) {
    const GameConfig& c = p.config;
    RunRow row;
    row.run_id = replication + 1;
    row.seed = replication_seed(c.base_seed, replication);
    RandomStream alg_stream(derive_seed(c.base_seed, replication, StreamRole::algorithm));
    RandomStream adv_stream(derive_seed(c.base_seed, replication, StreamRole::adversary));
    const GameShape shape{c.T, c.n};

    switch (p.algorithm->kind) {
        case GameKind::full_info: {
            auto policy = make_full_info(c);
            if (p.adversary->adaptive) {
                auto adversary = make_adaptive(c);
                auto [trace, realized] = run_adaptive(*policy, *adversary, shape, alg_stream);
                row.regret = regret_of(trace, realized);
                row.switches = switches_of(trace);
                row.epochs = trace.epochs();
            } else {
                const LossMatrix L = make_losses(p, adv_stream);
                const RunTrace trace = run_full_info(*policy, L, alg_stream);
                row.regret = regret_of(trace, L);
                row.switches = switches_of(trace);
                row.epochs = trace.epochs();
            }
            break;
        }
        case GameKind::bandit: {
            auto policy = make_bandit(c);
            const LossMatrix L = make_losses(p, adv_stream);
            const RunTrace trace = run_bandit(*policy, L, alg_stream);
            row.regret = regret_of(trace, L);
            row.switches = switches_of(trace);
            row.epochs = trace.epochs();
            break;
        }
        case GameKind::combinatorial: {
            auto policy = make_comb(p);
            const LossMatrix L = make_losses(p, adv_stream);
            const CombTrace trace = run_combinatorial(*policy, L, alg_stream);
            row.regret = comb_regret_of(trace, *p.set, L);
            row.switches = comb_switches_of(trace);
            row.epochs = trace.epochs();
            break;
        }
    }
    if (auto limit = switch_limit(c); limit && row.switches > *limit) {
        throw BudgetViolation(c.algorithm + " made " + std::to_string(row.switches) + " switches with limit " +
                              std::to_string(*limit) + " (replication " + std::to_string(row.run_id) + ")");
    }
    return row;
}

}  // namespace

const std::vector<AlgorithmInfo>& algorithm_registry() {
    using K = GameKind;
    static const std::vector<AlgorithmInfo> reg = {
        alg("ftl", K::full_info, "follow the leader", {}),
        alg("mfpl", K::full_info, "FPL with one exponential perturbation of scale 1/eps",
            {{"alg.eps", false, "perturbation rate (default sqrt(ln n / T))"}}),
        alg("pr", K::full_info, "FPL with +-1/2 perturbations every round", {}),
        alg("sd", K::full_info, "shrinking dartboard",
            {{"alg.eta", false, "rate in (0,1) (default min(1/2, sqrt(ln n / T)))"}}),
        alg("bmfpl", K::full_info, "restart framework over MFPL",
            {kDelta, {"alg.quota", false, "per-epoch switch quota (default tuned)"}}),
        alg("bpr", K::full_info, "restart framework over PR",
            {kDelta, {"alg.quota", false, "per-epoch switch quota (default tuned)"}}),
        alg("lagged_mfpl", K::full_info, "MFPL that plays the bottom action for a while with probability p",
            {{"alg.p", true, "lag probability"},
             {"alg.bad_rounds", true, "length of the lag"},
             {"alg.eps", false, "MFPL rate"},
             {"alg.bottom", false, "bottom action, 1-based (default n)"}}),
        alg("capped_ftl", K::full_info, "FTL frozen after S switches", {kBudget}),
        alg("capped_mfpl", K::full_info, "MFPL frozen after S switches", {kBudget, {"alg.eps", false, "MFPL rate"}}),
        alg("pfe_budget_high", K::full_info, "budgeted experts, S >= kappa sqrt(T ln n)",
            {kBudget, kDelta, {"alg.kappa", false, "regime constant (default 1)"},
             {"alg.base", false, "bmfpl or bpr (default bmfpl)"}}),
        alg("pfe_budget_low", K::full_info, "budgeted experts via mini-batching, small S",
            {kBudget, kDelta, {"alg.kappa", false, "regime constant (default 1)"},
             {"alg.base", false, "bmfpl or bpr (default bmfpl)"}}),
        alg("pfe_budget", K::full_info, "pfe_budget_high or pfe_budget_low by regime",
            {kBudget, kDelta, {"alg.kappa", false, "regime constant (default 1)"},
             {"alg.base", false, "bmfpl or bpr (default bmfpl)"}}),
        alg("uniform_random", K::full_info, "uniformly random action every round", {}),
        alg("constant", K::full_info, "one fixed action", {{"alg.action", false, "1-based action (default 1)"}}),
        alg("exp3p", K::bandit, "Exp3.P", {kDelta, kExp3Eta, kExp3Gamma, kExp3Beta}),
        alg("batched_exp3p", K::bandit, "Exp3.P over S equal epochs",
            {kBudget, kDelta, kExp3Eta, kExp3Gamma, kExp3Beta}),
        alg("bandit_switching_cost", K::bandit, "batched Exp3.P with S = ceil((T/c)^(2/3) n^(1/3))",
            {{"c", true, "switching cost >= 1"}, kDelta, kExp3Eta, kExp3Gamma, kExp3Beta}),
        alg("uniform_random_bandit", K::bandit, "uniformly random arm every round", {}),
        alg("cpr", K::combinatorial, "Gaussian-perturbed leader over m-sparse vertices",
            {{"alg.m", false, "sparsity for the top-m set"},
             {"decision_set", false, "vertex list file"},
             {"alg.eta", false, "Gaussian scale (default (ln d)^(-1/2))"}}),
        alg("bcpr", K::combinatorial, "restart framework over CPR",
            {kDelta,
             {"c", false, "scale of the quota (default 1)"},
             {"alg.m", false, "sparsity for the top-m set"},
             {"decision_set", false, "vertex list file"},
             {"alg.eta", false, "Gaussian scale"},
             {"alg.quota", false, "per-epoch switch quota (default tuned)"}}),
    };
    return reg;
}

const std::vector<AdversaryInfo>& adversary_registry() {
    static const std::vector<AdversaryInfo> reg = {
        adv("iid_bernoulli", "every entry Bernoulli(1/2)", {}),
        adv("batched_bernoulli", "Bernoulli(1/2) redrawn once per epoch",
            {{"S", false, "epochs = ceil(S^2 / ln n)"}, {"adv.epochs", false, "explicit epoch count"}}),
        adv("alternating", "two actions, (0,1/2) then (1,0),(0,1),...", {}),
        adv("sd_tail", "loss 1 on a random arm for the first ceil(T') rounds",
            {{"adv.eta", true, "rate of the SD player being attacked"}, kDelta}),
        adv("follow_punisher", "loss 1 on the player's previous action", {}, true, false, false),
        adv("mrw", "multi-scale random walk with a hidden better arm", {kBudget}),
        adv("gap_bernoulli", "one arm Bernoulli(1/2 - gap), others Bernoulli(1/2)",
            {{"adv.gap", true, "gap in (0, 1/2)"}}),
        adv("loss_file", "fixed T x n matrix from a CSV file", {{"adv.path", true, "CSV path"}}),
    };
    return reg;
}

void validate_config(const GameConfig& config) { (void)prepare(config); }

std::optional<std::size_t> switch_limit(const GameConfig& c) {
    const std::string& id = c.algorithm;
    if ((id == "capped_ftl" || id == "capped_mfpl" || id == "pfe_budget_high" || id == "pfe_budget_low" ||
         id == "pfe_budget") &&
        c.S) {
        return *c.S;
    }
    if (id == "batched_exp3p" && c.S) return *c.S - 1;
    if (id == "bandit_switching_cost" && c.c) return switching_cost_budget(c.T, c.n, *c.c) - 1;
    return std::nullopt;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t replication) {
    return mix_seed(base_seed, replication);
}

RunRow run_replication(const GameConfig& config, std::size_t replication) {
    return run_prepared(prepare(config), replication);
}

StatSummary summarize_rows(const std::vector<RunRow>& rows, const std::vector<double>& thresholds) {
    std::vector<double> regrets;
    std::vector<std::size_t> switches, epochs;
    for (const auto& r : rows) {
        regrets.push_back(r.regret);
        switches.push_back(r.switches);
        epochs.push_back(r.epochs);
    }
    return summarize(regrets, switches, epochs, thresholds);
}

ExperimentResult monte_carlo(const GameConfig& config, std::size_t jobs) {
    const auto start = std::chrono::steady_clock::now();
    const Prepared p = prepare(config);
    const std::size_t reps = config.replications;
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, reps);

    ExperimentResult result;
    result.config = config;
    result.rows.resize(reps);
    std::vector<std::exception_ptr> errors(reps);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t r = next++; r < reps; r = next++) {
            try {
                result.rows[r] = run_prepared(p, r);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (jobs <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    result.summary = summarize_rows(result.rows, config.tail_thresholds);
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

GameConfig with_parameter(const GameConfig& config, const std::string& parameter, double value) {
    GameConfig c = config;
    auto count = [&] {
        if (!(value >= 1.0) || value != std::floor(value)) {
            throw ConfigError("grid", parameter + " values must be positive integers");
        }
        return static_cast<std::size_t>(value);
    };
    if (parameter == "S") {
        c.S = count();
    } else if (parameter == "T") {
        c.T = count();
    } else if (parameter == "n") {
        c.n = count();
    } else if (parameter == "c") {
        c.c = value;
    } else {
        throw ConfigError("param", "sweep parameter must be one of S, c, T, n");
    }
    return c;
}

SweepResult sweep(const GameConfig& config, const std::string& parameter, const std::vector<double>& grid,
                  std::size_t jobs) {
    if (grid.size() < 3) throw ConfigError("grid", "needs at least 3 values");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw ConfigError("grid", "values must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("grid", "values must be strictly increasing");
    }
    SweepResult out;
    out.parameter = parameter;
    out.grid = grid;
    // Validate every point before running any.
    std::vector<GameConfig> configs;
    for (double v : grid) {
        configs.push_back(with_parameter(config, parameter, v));
        validate_config(configs.back());
    }
    std::vector<double> means;
    for (const auto& c : configs) {
        out.points.push_back(monte_carlo(c, jobs));
        means.push_back(out.points.back().summary.mean_regret);
    }
    if (std::all_of(means.begin(), means.end(), [](double m) { return m > 0.0; })) {
        out.fit = fit_loglog_slope(grid, means);
    } else {
        out.fit.slope = std::nan("");
        out.fit.intercept = std::nan("");
        out.fit.ci_low = std::nan("");
        out.fit.ci_high = std::nan("");
        out.fit.points = grid.size();
    }
    return out;
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw ConfigError("format", "expected csv or json, got '" + name + "'");
}

// ---- config text ---------------------------------------------------------------

GameConfig parse_config(std::istream& in) {
    GameConfig c;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        if (!seen.insert(key).second) throw ConfigError(key, "given twice");
        if (value.empty()) throw ConfigError(key, "empty value");

        if (key == "algorithm") {
            c.algorithm = value;
        } else if (key == "adversary") {
            c.adversary = value;
        } else if (key == "T") {
            c.T = parse_count(key, value);
        } else if (key == "n") {
            c.n = parse_count(key, value);
        } else if (key == "S") {
            c.S = parse_count(key, value);
        } else if (key == "c") {
            c.c = parse_real(key, value);
        } else if (key == "delta") {
            c.delta = parse_real(key, value);
        } else if (key == "replications") {
            c.replications = parse_count(key, value);
        } else if (key == "seed") {
            c.base_seed = parse_seed(key, value);
        } else if (key == "tail_thresholds") {
            c.tail_thresholds = parse_list(key, value);
        } else if (key == "decision_set") {
            c.decision_set = value;
        } else if (key.rfind("alg.", 0) == 0 && key.size() > 4) {
            c.alg[key.substr(4)] = value;
        } else if (key.rfind("adv.", 0) == 0 && key.size() > 4) {
            c.adv[key.substr(4)] = value;
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    return c;
}

GameConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config '" + path + "'");
    return parse_config(in);
}

std::string format_config(const GameConfig& c) {
    std::ostringstream os;
    os << "algorithm = " << c.algorithm << "\n";
    os << "adversary = " << c.adversary << "\n";
    os << "T = " << c.T << "\n";
    os << "n = " << c.n << "\n";
    if (c.S) os << "S = " << *c.S << "\n";
    if (c.c) os << "c = " << num(*c.c) << "\n";
    if (c.delta) os << "delta = " << num(*c.delta) << "\n";
    os << "replications = " << c.replications << "\n";
    os << "seed = " << c.base_seed << "\n";
    if (!c.tail_thresholds.empty()) {
        os << "tail_thresholds = ";
        for (std::size_t i = 0; i < c.tail_thresholds.size(); ++i) {
            os << (i ? "," : "") << num(c.tail_thresholds[i]);
        }
        os << "\n";
    }
    if (c.decision_set) os << "decision_set = " << *c.decision_set << "\n";
    for (const auto& [k, v] : c.alg) os << "alg." << k << " = " << v << "\n";
    for (const auto& [k, v] : c.adv) os << "adv." << k << " = " << v << "\n";
    return os.str();
}

// ---- emission ----------------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kCsvHeader = "run_id,algorithm,adversary,T,n,S,c,delta,seed,regret,switches,epochs";

void write_rows_csv(std::ostream& out, const GameConfig& c, const std::vector<RunRow>& rows) {
    const std::string s = c.S ? std::to_string(*c.S) : "";
    const std::string cost = c.c ? num(*c.c) : "";
    const std::string delta = c.delta ? num(*c.delta) : "";
    for (const auto& r : rows) {
        out << r.run_id << ',' << c.algorithm << ',' << c.adversary << ',' << c.T << ',' << c.n << ',' << s << ','
            << cost << ',' << delta << ',' << r.seed << ',' << num(r.regret) << ',' << r.switches << ',' << r.epochs
            << '\n';
    }
}

void write_summary_csv(std::ostream& out, const StatSummary& s) {
    out << "# count," << s.count << '\n';
    out << "# mean_regret," << num(s.mean_regret) << '\n';
    out << "# std_error_regret," << num(s.std_error_regret) << '\n';
    out << "# mean_switches," << num(s.mean_switches) << '\n';
    out << "# mean_epochs," << num(s.mean_epochs) << '\n';
    out << "# max_switches," << s.max_switches << '\n';
    for (const auto& [level, v] : s.quantiles) out << "# quantile," << num(level) << ',' << num(v) << '\n';
    for (const auto& [cut, v] : s.tail_frequencies) out << "# tail_frequency," << num(cut) << ',' << num(v) << '\n';
}

ordered_json config_json(const GameConfig& c) {
    ordered_json j;
    j["algorithm"] = c.algorithm;
    j["adversary"] = c.adversary;
    j["T"] = c.T;
    j["n"] = c.n;
    j["S"] = c.S ? ordered_json(*c.S) : ordered_json(nullptr);
    j["c"] = c.c ? ordered_json(*c.c) : ordered_json(nullptr);
    j["delta"] = c.delta ? ordered_json(*c.delta) : ordered_json(nullptr);
    j["replications"] = c.replications;
    j["seed"] = c.base_seed;
    j["tail_thresholds"] = c.tail_thresholds;
    j["decision_set"] = c.decision_set ? ordered_json(*c.decision_set) : ordered_json(nullptr);
    j["alg"] = ordered_json::object();
    for (const auto& [k, v] : c.alg) j["alg"][k] = v;
    j["adv"] = ordered_json::object();
    for (const auto& [k, v] : c.adv) j["adv"][k] = v;
    return j;
}

ordered_json summary_json(const StatSummary& s) {
    ordered_json j;
    j["count"] = s.count;
    j["mean_regret"] = s.mean_regret;
    j["std_error_regret"] = s.std_error_regret;
    j["mean_switches"] = s.mean_switches;
    j["mean_epochs"] = s.mean_epochs;
    j["max_switches"] = s.max_switches;
    j["quantiles"] = ordered_json::array();
    for (const auto& [level, v] : s.quantiles) j["quantiles"].push_back({{"level", level}, {"regret", v}});
    j["tail_frequencies"] = ordered_json::array();
    for (const auto& [cut, v] : s.tail_frequencies) {
        j["tail_frequencies"].push_back({{"threshold", cut}, {"frequency", v}});
    }
    return j;
}

ordered_json result_json(const ExperimentResult& r) {
    ordered_json j;
    j["config"] = config_json(r.config);
    j["rows"] = ordered_json::array();
    for (const auto& row : r.rows) {
        j["rows"].push_back({{"run_id", row.run_id},
                             {"seed", row.seed},
                             {"regret", row.regret},
                             {"switches", row.switches},
                             {"epochs", row.epochs}});
    }
    j["summary"] = summary_json(r.summary);
    return j;
}

ordered_json fit_json(const SlopeFit& f) {
    auto val = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
    return {{"slope", val(f.slope)},       {"intercept", val(f.intercept)}, {"std_error", val(f.std_error)},
            {"ci_low", val(f.ci_low)},     {"ci_high", val(f.ci_high)},     {"points", f.points}};
}

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        std::cout.flush();
        if (!std::cout) throw IoError("cannot write to standard output");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    fn(out);
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

void write_results(std::ostream& out, const ExperimentResult& result, OutputFormat format) {
    if (format == OutputFormat::json) {
        out << result_json(result).dump(2) << '\n';
        return;
    }
    out << kCsvHeader << '\n';
    write_rows_csv(out, result.config, result.rows);
    write_summary_csv(out, result.summary);
}

void write_sweep(std::ostream& out, const SweepResult& result, OutputFormat format) {
    if (format == OutputFormat::json) {
        ordered_json j;
        j["parameter"] = result.parameter;
        j["grid"] = result.grid;
        j["points"] = ordered_json::array();
        for (const auto& p : result.points) j["points"].push_back(result_json(p));
        j["fit"] = fit_json(result.fit);
        out << j.dump(2) << '\n';
        return;
    }
    out << kCsvHeader << '\n';
    for (const auto& p : result.points) write_rows_csv(out, p.config, p.rows);
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        out << "# point," << result.parameter << ',' << num(result.grid[i]) << '\n';
        write_summary_csv(out, result.points[i].summary);
    }
    out << "# slope," << num(result.fit.slope) << '\n';
    out << "# slope_ci," << num(result.fit.ci_low) << ',' << num(result.fit.ci_high) << '\n';
    out << "# intercept," << num(result.fit.intercept) << '\n';
}

void emit_results(const ExperimentResult& result, const std::string& path, OutputFormat format) {
    with_output(path, [&](std::ostream& out) { write_results(out, result, format); });
}

void emit_sweep(const SweepResult& result, const std::string& path, OutputFormat format) {
    with_output(path, [&](std::ostream& out) { write_sweep(out, result, format); });
}

ParsedResults read_results_csv(std::istream& in) {
    ParsedResults out;
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader) throw InvalidArgument("missing results header");
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        if (!s.empty() && s.back() == ',') parts.emplace_back();
        return parts;
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto parts = split(line.substr(2));
            const std::string& key = parts.at(0);
            StatSummary& s = out.summary;
            if (key == "count") {
                s.count = parse_count(key, parts.at(1));
            } else if (key == "mean_regret") {
                s.mean_regret = parse_real(key, parts.at(1));
            } else if (key == "std_error_regret") {
                s.std_error_regret = parse_real(key, parts.at(1));
            } else if (key == "mean_switches") {
                s.mean_switches = parse_real(key, parts.at(1));
            } else if (key == "mean_epochs") {
                s.mean_epochs = parse_real(key, parts.at(1));
            } else if (key == "max_switches") {
                s.max_switches = parse_count(key, parts.at(1));
            } else if (key == "quantile") {
                s.quantiles[parse_real(key, parts.at(1))] = parse_real(key, parts.at(2));
            } else if (key == "tail_frequency") {
                s.tail_frequencies[parse_real(key, parts.at(1))] = parse_real(key, parts.at(2));
            } else {
                throw InvalidArgument("unknown summary line '" + line + "'");
            }
            continue;
        }
        const auto parts = split(line);
        if (parts.size() != 12) throw InvalidArgument("results row needs 12 columns: '" + line + "'");
        RunRow r;
        r.run_id = parse_count("run_id", parts[0]);
        r.seed = parse_seed("seed", parts[8]);
        r.regret = parse_real("regret", parts[9]);
        r.switches = parse_count("switches", parts[10]);
        r.epochs = parse_count("epochs", parts[11]);
        out.rows.push_back(r);
    }
    return out;
}

}  // namespace switchbench
