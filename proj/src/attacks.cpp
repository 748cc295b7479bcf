#include "rtp/attacks.hpp"
#include "rtp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace rtp {

std::string to_string(AttackKind kind) {
    switch (kind) {
    case AttackKind::none: return "none";
    case AttackKind::scaling: return "scaling";
    case AttackKind::delay: return "delay";
    case AttackKind::scaled_delay: return "scaled_delay";
    case AttackKind::composite: return "composite";
    }
    return "?";
}

AttackKind parse_attack_kind(const std::string& s) {
    if (s == "none") return AttackKind::none;
    if (s == "scaling") return AttackKind::scaling;
    if (s == "delay") return AttackKind::delay;
    if (s == "scaled_delay" || s == "scaled-delay") return AttackKind::scaled_delay;
    if (s == "composite") return AttackKind::composite;
    throw config_error("unknown attack kind '" + s + "'");
}

namespace {

void validate_group(const AttackGroup& g) {
    if (g.kind == AttackKind::composite) throw config_error("attack group cannot itself be composite");
    if (!(g.rho > 0.0 && g.rho <= 1.0)) throw config_error("attack: rho must lie in (0, 1]");
    if (!(g.gamma > 0.0) || !std::isfinite(g.gamma)) throw config_error("attack: gamma must be positive");
    if ((g.kind == AttackKind::delay || g.kind == AttackKind::scaled_delay) && g.tau < 1)
        throw config_error("attack: tau must be at least 1");
}

}  // namespace

void AttackSpec::validate() const {
    if (kind == AttackKind::none) return;
    if (kind == AttackKind::composite) {
        if (groups.empty()) throw config_error("composite attack needs at least one group");
        for (const auto& g : groups) {
            if (g.kind == AttackKind::none) throw config_error("composite group of kind none");
            validate_group(g);
        }
        if (total_rho() > 1.0 + 1e-12) throw config_error("composite group fractions sum above 1");
        return;
    }
    validate_group({kind, rho, gamma, tau});
}

std::vector<AttackGroup> AttackSpec::effective_groups() const {
    if (kind == AttackKind::none) return {};
    if (kind == AttackKind::composite) return groups;
    return {AttackGroup{kind, rho, gamma, tau}};
}

double AttackSpec::total_rho() const {
    double s = 0.0;
    for (const auto& g : effective_groups()) s += g.rho;
    return s;
}

AttackSpec no_attack() { return {}; }

AttackSpec scaling_attack(double rho, double gamma, long start_k) {
    AttackSpec a;
    a.kind = AttackKind::scaling;
    a.rho = rho;
    a.gamma = gamma;
    a.start_k = start_k;
    return a;
}

AttackSpec delay_attack(double rho, int tau, long start_k) {
    AttackSpec a;
    a.kind = AttackKind::delay;
    a.rho = rho;
    a.tau = tau;
    a.start_k = start_k;
    return a;
}

AttackSpec scaled_delay_attack(double rho, double gamma, int tau, long start_k) {
    AttackSpec a = delay_attack(rho, tau, start_k);
    a.kind = AttackKind::scaled_delay;
    a.gamma = gamma;
    return a;
}

double attacked_price(const AttackGroup& group, const std::vector<double>& history, long k, long start_k) {
    if (k < 0 || static_cast<std::size_t>(k) >= history.size())
        throw domain_error("attacked_price: period outside the price history");
    const double now = history[static_cast<std::size_t>(k)];
    if (k < start_k) return now;
    // Before tau true prices exist the meter replays lambda_0.
    auto lagged = [&](int tau) { return history[static_cast<std::size_t>(std::max(0L, k - tau))]; };
    switch (group.kind) {
    case AttackKind::none: return now;
    case AttackKind::scaling: return group.gamma * now;
    case AttackKind::delay: return lagged(group.tau);
    case AttackKind::scaled_delay: return group.gamma * lagged(group.tau);
    case AttackKind::composite: break;
    }
    throw domain_error("attacked_price: composite is not a group kind");
}

std::vector<double> apply_attack(const AttackSpec& spec, const std::vector<double>& history, long k) {
    auto groups = spec.effective_groups();
    if (groups.empty()) return {attacked_price(AttackGroup{}, history, k, spec.start_k)};
    std::vector<double> out;
    out.reserve(groups.size());
    for (const auto& g : groups) out.push_back(attacked_price(g, history, k, spec.start_k));
    return out;
}

double mu_ceo(double gamma, double epsilon) {
    if (!(gamma > 0.0)) throw domain_error("mu_ceo: gamma must be positive");
    return std::pow(gamma, epsilon - 1.0);
}

void assign_compromised(ConsumerPopulation& pop, const AttackSpec& spec, std::uint64_t seed) {
    for (auto& c : pop.consumers) c.group = 0;
    auto groups = spec.effective_groups();
    if (groups.empty()) return;
    const std::size_t n = pop.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t next = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        auto count = static_cast<std::size_t>(std::llround(groups[g].rho * static_cast<double>(n)));
        if (next + count > n) throw config_error("attack groups need more consumers than exist");
        for (std::size_t i = 0; i < count; ++i) pop.consumers[order[next++]].group = static_cast<int>(g) + 1;
    }
}

}  // namespace rtp
