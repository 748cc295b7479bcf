#pragma once

#include "rtp/models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rtp {

enum class AttackKind { none, scaling, delay, scaled_delay, composite };

std::string to_string(AttackKind kind);
AttackKind parse_attack_kind(const std::string& s);

// A single compromised consumer group.  `kind` is never composite.
struct AttackGroup {
    AttackKind kind = AttackKind::none;
    double rho = 1.0;
    double gamma = 1.0;
    int tau = 1;
};

struct AttackSpec {
    AttackKind kind = AttackKind::none;
    double rho = 1.0;
    double gamma = 1.0;
    int tau = 1;
    long start_k = 0;
    std::vector<AttackGroup> groups;  // composite only

    void validate() const;
    // Flattened list of groups: empty for none, one entry for simple kinds.
    std::vector<AttackGroup> effective_groups() const;
    double total_rho() const;
};

AttackSpec no_attack();
AttackSpec scaling_attack(double rho, double gamma, long start_k = 0);
AttackSpec delay_attack(double rho, int tau, long start_k = 0);
AttackSpec scaled_delay_attack(double rho, double gamma, int tau, long start_k = 0);

// Price served to one group at period k.  history[j] = true lambda_j, j <= k.
double attacked_price(const AttackGroup& group, const std::vector<double>& history, long k,
                      long start_k);

// One compromised price per group (size 1 for non-composite kinds).  For
// `none`, returns {lambda_k}.
std::vector<double> apply_attack(const AttackSpec& spec, const std::vector<double>& history, long k);

double mu_ceo(double gamma, double epsilon);

// Marks disjoint groups of round(rho_g * n) consumers, chosen uniformly at
// random with the given seed.  Existing marks are cleared.
void assign_compromised(ConsumerPopulation& pop, const AttackSpec& spec, std::uint64_t seed);

}  // namespace rtp
