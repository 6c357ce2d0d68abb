#include "switchbench/combinatorial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>

namespace switchbench {

namespace {

constexpr double kMaxEnumerated = 1e6;

double binomial(std::size_t d, std::size_t m) {
    double c = 1.0;
    for (std::size_t k = 1; k <= m; ++k) c = c * static_cast<double>(d - m + k) / static_cast<double>(k);
    return c;
}

}  // namespace

std::size_t Vertex::weight() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }

double Vertex::dot(std::span<const double> scores) const {
    double s = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) s += scores[i];
    }
    return s;
}

std::string Vertex::to_string() const {
    std::string s;
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

Vertex topm_oracle(std::span<const double> scores, std::size_t m) {
    const std::size_t d = scores.size();
    if (m < 1 || m > d) throw InvalidArgument("top-m oracle needs 1 <= m <= d");
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    Vertex v{std::vector<std::uint8_t>(d, 0)};
    for (std::size_t k = 0; k < m; ++k) v.bits[order[k]] = 1;
    return v;
}

Vertex brute_force_oracle(std::span<const Vertex> vertices, std::span<const double> scores) {
    if (vertices.empty()) throw InvalidArgument("brute-force oracle needs a nonempty vertex list");
    std::size_t best = 0;
    double best_score = vertices[0].dot(scores);
    for (std::size_t k = 1; k < vertices.size(); ++k) {
        const double s = vertices[k].dot(scores);
        if (s < best_score) {
            best = k;
            best_score = s;
        }
    }
    return vertices[best];
}

std::vector<Vertex> enumerate_m_sparse(std::size_t d, std::size_t m) {
    if (m < 1 || m > d) throw InvalidArgument("enumeration needs 1 <= m <= d");
    std::vector<Vertex> out;
    std::vector<std::size_t> support(m);
    std::iota(support.begin(), support.end(), 0);
    while (true) {
        Vertex v{std::vector<std::uint8_t>(d, 0)};
        for (auto i : support) v.bits[i] = 1;
        out.push_back(std::move(v));
        // Advance to the next combination in lexicographic order.
        std::size_t k = m;
        while (k > 0 && support[k - 1] == d - m + (k - 1)) --k;
        if (k == 0) break;
        ++support[k - 1];
        for (std::size_t j = k; j < m; ++j) support[j] = support[j - 1] + 1;
    }
    return out;
}

DecisionSet DecisionSet::top_m(std::size_t d, std::size_t m) {
    if (m < 1 || m > d) throw InvalidArgument("top-m decision set needs 1 <= m <= d");
    DecisionSet s;
    s.d_ = d;
    s.m_ = m;
    return s;
}

DecisionSet DecisionSet::explicit_list(std::vector<Vertex> vertices) {
    if (vertices.empty()) throw InvalidArgument("decision set needs at least one vertex");
    DecisionSet s;
    s.d_ = vertices.front().dimension();
    s.m_ = vertices.front().weight();
    for (const auto& v : vertices) {
        if (v.dimension() != s.d_) throw InvalidArgument("decision set vertices differ in dimension");
        if (v.weight() != s.m_) throw InvalidArgument("decision set vertices differ in sparsity");
    }
    if (s.m_ == 0) throw InvalidArgument("decision set vertices must have at least one 1");
    s.vertices_ = std::move(vertices);
    return s;
}

bool DecisionSet::enumerable() const { return vertices_.has_value() || binomial(d_, m_) <= kMaxEnumerated; }

Vertex DecisionSet::minimize(std::span<const double> scores) const {
    if (scores.size() != d_) throw InvalidArgument("score vector dimension mismatch");
    return vertices_ ? brute_force_oracle(*vertices_, scores) : topm_oracle(scores, m_);
}

double DecisionSet::maximum(std::span<const double> scores) const {
    std::vector<double> negated(scores.begin(), scores.end());
    for (auto& v : negated) v = -v;
    return minimize(negated).dot(scores);
}

std::vector<Vertex> DecisionSet::enumerate() const {
    if (vertices_) return *vertices_;
    if (!enumerable()) throw InvalidArgument("decision set too large to enumerate");
    return enumerate_m_sparse(d_, m_);
}

DecisionSet read_decision_set(std::istream& in) {
    std::vector<Vertex> vertices;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        Vertex v;
        for (char ch : line) {
            if (ch != '0' && ch != '1') {
                throw InvalidArgument("decision set line " + std::to_string(line_no) + ": expected only 0/1");
            }
            v.bits.push_back(ch == '1' ? 1 : 0);
        }
        vertices.push_back(std::move(v));
    }
    return DecisionSet::explicit_list(std::move(vertices));
}

DecisionSet load_decision_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open decision set file: " + path);
    return read_decision_set(in);
}

double cpr_default_eta(std::size_t d) { return 1.0 / std::sqrt(std::log(static_cast<double>(d))); }

CprPolicy::CprPolicy(DecisionSet set, double eta, bool record_history)
    : set_(std::move(set)), eta_(eta), record_(record_history) {
    if (!(eta > 0.0)) throw InvalidArgument("CPR eta must be > 0");
}

CprPolicy::CprPolicy(DecisionSet set, std::vector<std::vector<double>> injected, bool record_history)
    : set_(std::move(set)), injected_(std::move(injected)), record_(record_history) {}

void CprPolicy::reset(GameShape shape, RandomStream stream) {
    if (shape.actions != set_.dimension()) throw InvalidArgument("loss dimension does not match decision set");
    rng_ = stream;
    protocol_.reset(shape.rounds);
    score_.assign(shape.actions, 0.0);
    totals_.assign(shape.actions, 0.0);
    latest_.assign(shape.actions, 0.0);
    played_ = 0.0;
    last_played_.reset();
    history_.clear();
    add_perturbation(1);
}

void CprPolicy::add_perturbation(std::size_t round) {
    if (injected_) {
        if (round <= injected_->size()) {
            const auto& row = (*injected_)[round - 1];
            if (row.size() != latest_.size()) throw InvalidArgument("injected perturbation row has wrong width");
            latest_ = row;
        } else {
            std::fill(latest_.begin(), latest_.end(), 0.0);
        }
    } else {
        for (auto& v : latest_) v = eta_ * rng_.gaussian();
    }
    for (std::size_t i = 0; i < latest_.size(); ++i) {
        score_[i] += latest_[i];
        totals_[i] += latest_[i];
    }
    if (record_) history_.push_back(latest_);
}

Vertex CprPolicy::choose(std::size_t round) {
    protocol_.on_choose(round);
    Vertex v = set_.minimize(score_);
    played_ += v.dot(latest_);
    last_played_ = v;
    return v;
}

void CprPolicy::observe(std::span<const double> losses) {
    if (losses.size() != score_.size()) throw InvalidArgument("loss vector width mismatch");
    validate_losses(losses);
    const std::size_t round = protocol_.on_observe();
    for (std::size_t i = 0; i < score_.size(); ++i) score_[i] += losses[i];
    add_perturbation(round + 1);
}

std::vector<FplCertificate> CprPolicy::fpl_certificates() const {
    FplCertificate cert;
    cert.rounds = protocol_.completed();
    cert.perturbation_totals = totals_;
    const Vertex terminal = set_.minimize(score_);
    cert.played_perturbation = played_ + terminal.dot(latest_);
    cert.terminal_moved = last_played_.has_value() && !(*last_played_ == terminal);
    return {cert};
}

std::size_t bcpr_quota(std::size_t rounds, std::size_t d, std::size_t m, double delta, double c) {
    if (!(delta > 0.0 && delta < 0.5)) throw InvalidArgument("delta must lie in (0, 1/2)");
    const double q = 23.0 * c * static_cast<double>(m) *
                     std::sqrt(static_cast<double>(rounds) / std::log(2.0 / delta)) *
                     std::log(static_cast<double>(d));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q)));
}

std::unique_ptr<CombRestartFramework> bcpr(const DecisionSet& set, std::size_t rounds, double delta, double c,
                                           std::optional<double> eta, std::optional<std::size_t> quota_override) {
    const double scale = eta.value_or(cpr_default_eta(set.dimension()));
    const std::size_t quota = quota_override.value_or(bcpr_quota(rounds, set.dimension(), set.sparsity(), delta, c));
    return std::make_unique<CombRestartFramework>(
        [set, scale] { return CombPolicyPtr(std::make_unique<CprPolicy>(set, scale)); }, quota);
}

void CombTrace::push(Vertex v, double incurred_loss, std::size_t epoch_id) {
    const bool sw = !steps_.empty() && !(steps_.back().vertex == v);
    steps_.push_back({std::move(v), incurred_loss, sw, epoch_id});
}

double CombTrace::total_loss() const {
    double total = 0.0;
    for (const auto& s : steps_) total += s.incurred_loss;
    return total;
}

std::pair<Vertex, double> comb_best_in_hindsight(const DecisionSet& set, const LossMatrix& losses) {
    const auto sums = losses.column_sums();
    Vertex v = set.minimize(sums);
    const double value = v.dot(sums);
    return {std::move(v), value};
}

double comb_regret_of(const CombTrace& trace, const DecisionSet& set, const LossMatrix& losses) {
    if (trace.size() != losses.rounds()) throw InvalidArgument("trace length does not match T");
    return trace.total_loss() - comb_best_in_hindsight(set, losses).second;
}

std::size_t comb_switches_of(const CombTrace& trace) {
    std::size_t count = 0;
    for (std::size_t t = 1; t < trace.size(); ++t) {
        if (!(trace[t].vertex == trace[t - 1].vertex)) ++count;
    }
    return count;
}

double comb_loss_range(const DecisionSet& set, const LossMatrix& losses) {
    double m = 0.0;
    for (std::size_t t = 1; t <= losses.rounds(); ++t) {
        auto row = losses.row(t);
        m = std::max(m, set.maximum(row) - set.minimize(row).dot(row));
    }
    return m;
}

}  // namespace switchbench
