#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "switchbench/batching.hpp"
#include "switchbench/core.hpp"
#include "switchbench/experts.hpp"
#include "switchbench/random.hpp"

namespace switchbench {

/// Binary vector with exactly m ones.
struct Vertex {
    std::vector<std::uint8_t> bits;

    std::size_t dimension() const { return bits.size(); }
    std::size_t weight() const;
    double dot(std::span<const double> scores) const;
    std::string to_string() const;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// Indicator of the m smallest scores; ties go to the lowest index.
Vertex topm_oracle(std::span<const double> scores, std::size_t m);

/// Exact argmin of v . scores over `vertices`; ties go to the earlier vertex.
Vertex brute_force_oracle(std::span<const Vertex> vertices, std::span<const double> scores);

/// All C(d, m) vertices in lexicographic order of their support.
std::vector<Vertex> enumerate_m_sparse(std::size_t d, std::size_t m);

/// Decision set S of m-sparse binary vectors with a deterministic linear
/// minimization oracle.
class DecisionSet {
public:
    static DecisionSet top_m(std::size_t d, std::size_t m);
    /// Explicit list; all vertices must share dimension and weight.
    static DecisionSet explicit_list(std::vector<Vertex> vertices);

    std::size_t dimension() const { return d_; }
    std::size_t sparsity() const { return m_; }
    bool enumerable() const;

    Vertex minimize(std::span<const double> scores) const;
    /// max_v v . scores.
    double maximum(std::span<const double> scores) const;
    std::vector<Vertex> enumerate() const;

private:
    DecisionSet() = default;

    std::size_t d_ = 0;
    std::size_t m_ = 0;
    std::optional<std::vector<Vertex>> vertices_;
};

/// Parses one vertex per line, each line d characters of '0'/'1'. Blank lines and
/// lines starting with '#' are skipped.
DecisionSet read_decision_set(std::istream& in);
DecisionSet load_decision_set(const std::string& path);

/// Full-information player over a decision set; losses are d-dimensional.
class CombPolicy {
public:
    virtual ~CombPolicy() = default;

    /// shape.actions is the dimension d.
    virtual void reset(GameShape shape, RandomStream stream) = 0;
    virtual Vertex choose(std::size_t round) = 0;
    virtual void observe(std::span<const double> losses) = 0;

    virtual std::size_t current_epoch() const { return 1; }
    virtual std::vector<FplCertificate> fpl_certificates() const { return {}; }
};

using CombPolicyPtr = std::unique_ptr<CombPolicy>;
using CombPolicyFactory = std::function<CombPolicyPtr()>;

/// Default Gaussian scale (ln d)^{-1/2}.
double cpr_default_eta(std::size_t d);

/// Gaussian-perturbed leader over a decision set: plays
/// oracle(sum_{s<t} (l_s + P_{s+1})) with P_t ~ N(0, eta^2 I_d).
class CprPolicy final : public CombPolicy {
public:
    CprPolicy(DecisionSet set, double eta, bool record_history = false);
    /// Deterministic perturbation rows P_1, P_2, ... (zero past the end).
    CprPolicy(DecisionSet set, std::vector<std::vector<double>> injected, bool record_history = false);

    void reset(GameShape shape, RandomStream stream) override;
    Vertex choose(std::size_t round) override;
    void observe(std::span<const double> losses) override;
    std::vector<FplCertificate> fpl_certificates() const override;

    const DecisionSet& decision_set() const { return set_; }
    /// Rows P_1 .. P_{L+1}; requires recording.
    const std::vector<std::vector<double>>& perturbation_history() const { return history_; }

private:
    void add_perturbation(std::size_t round);

    DecisionSet set_;
    double eta_ = 0.0;
    std::optional<std::vector<std::vector<double>>> injected_;
    bool record_;
    RoundProtocol protocol_;
    RandomStream rng_;
    std::vector<double> score_;
    std::vector<double> totals_;
    std::vector<double> latest_;
    double played_ = 0.0;
    std::optional<Vertex> last_played_;
    std::vector<std::vector<double>> history_;
};

using CombRestartFramework = BasicRestartFramework<CombPolicy, Vertex>;

/// S' = ceil(23 c m sqrt(T / ln(2/delta)) ln d).
std::size_t bcpr_quota(std::size_t rounds, std::size_t d, std::size_t m, double delta, double c = 1.0);

std::unique_ptr<CombRestartFramework> bcpr(const DecisionSet& set, std::size_t rounds, double delta,
                                           double c = 1.0, std::optional<double> eta = {},
                                           std::optional<std::size_t> quota_override = {});

/// Per-round record of a combinatorial game.
class CombTrace {
public:
    struct Step {
        Vertex vertex;
        double incurred_loss = 0.0;
        bool is_switch = false;
        std::size_t epoch_id = 1;
    };

    void push(Vertex v, double incurred_loss, std::size_t epoch_id = 1);

    std::size_t size() const { return steps_.size(); }
    const Step& operator[](std::size_t i) const { return steps_[i]; }
    const std::vector<Step>& steps() const { return steps_; }
    double total_loss() const;
    std::size_t epochs() const { return steps_.empty() ? 0 : steps_.back().epoch_id; }

private:
    std::vector<Step> steps_;
};

std::pair<Vertex, double> comb_best_in_hindsight(const DecisionSet& set, const LossMatrix& losses);
double comb_regret_of(const CombTrace& trace, const DecisionSet& set, const LossMatrix& losses);
std::size_t comb_switches_of(const CombTrace& trace);
/// max_t (max_v l_t . v - min_v l_t . v); at most m for losses in [0,1]^d.
double comb_loss_range(const DecisionSet& set, const LossMatrix& losses);

}  // namespace switchbench
