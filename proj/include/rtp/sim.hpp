#pragma once

#include "rtp/attacks.hpp"
#include "rtp/controller.hpp"
#include "rtp/models.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rtp {

// Attack launch at the first period after the convergence detector fires.
inline constexpr long kAttackAfterConvergence = -1;

struct SimConfig {
    double T = 0.5;
    long horizon = 1056;
    LinearSupplyParams supplier{152.0, 4503.0};

    // Aggregate CEO consumer side; used when `population` is empty.  The
    // attack's rho then splits w between attacked and honest prices.
    CeoDemandParams demand{1.0, -0.8};
    std::optional<ConsumerPopulation> population;

    double baseline_constant = 0.0;
    std::optional<BaselineTrace> baseline;  // overrides the constant

    ControllerConfig controller;
    AttackSpec attack;
    double lambda0 = 20.0;
    std::uint64_t seed = 1;
    std::optional<double> feeder_rating;

    // Mean-h window: 0 averages from the attack launch to the horizon end;
    // N > 0 averages the first N periods of the run.
    long mean_h_window = 0;

    void validate() const;
    bool trace_driven() const { return baseline.has_value(); }
    long periods_per_day() const;
    double baseline_at(long k) const;
};

struct TraceRow {
    long k = 0;
    double lambda = 0.0;
    std::vector<double> lambda_attacked;  // one per attacked group (or {lambda})
    double b = 0.0;
    double demand_honest = 0.0;
    double demand_compromised = 0.0;
    double demand_total = 0.0;
    double supply_scheduled = 0.0;
    double error = 0.0;
    double h = 0.0;
};

using SimTrace = std::vector<TraceRow>;

enum class RunClass { converged, converging, oscillating, diverging, diverged };

std::string to_string(RunClass c);

struct SimResult {
    SimTrace trace;
    long attack_start = -1;  // -1 when the attack never launched
    long converged_at = -1;  // first detector firing
    long diverged_at = -1;
    RunClass status = RunClass::oscillating;
    bool convergent = false;
    double mean_h = 0.0;
    double sigma_e = 0.0;
    double envelope_ratio = 1.0;
};

SimResult run(const SimConfig& cfg);

double volatility(const SimTrace& trace, long attack_start);

// Price-responsive demand model the ISO uses for slopes (honest, no attack).
const DemandModel& iso_demand_model(const SimConfig& cfg, CeoDemand& ceo_storage,
                                    std::optional<PopulationDemand>& pop_storage);

// Equilibrium supply s(lambda*) used to scale the divergence detector.
double reference_supply(const SimConfig& cfg);

struct DayMetrics {
    long day = 0;
    double emergency_frequency = 0.0;
    double max_overload_pct = 0.0;
};

std::vector<DayMetrics> feeder_events(const SimTrace& trace, double rating, long periods_per_day);

// 1.25 x the largest total demand of the same configuration without attack.
double default_feeder_rating(const SimConfig& cfg);

struct ProbabilityOptions {
    double lambda_min = 1.0;
    double lambda_max = 100.0;
    int prices = 100;
    int max_periods = 2000;
    ControllerMode mode = ControllerMode::direct_feedback;
    double eta = 0.5;
};

double convergence_probability(const LinearSupplyParams& supplier, double b, double epsilon,
                               double lambda_star, const ProbabilityOptions& opt = {});

struct MapCell {
    double epsilon = 0.0;
    double lambda_star = 0.0;
    double probability = 0.0;
};

std::vector<MapCell> stability_map(const LinearSupplyParams& supplier, double b,
                                   const std::vector<double>& epsilons,
                                   const std::vector<double>& lambda_stars,
                                   const ProbabilityOptions& opt = {}, int workers = 1);

struct LoadedBaseline {
    BaselineTrace trace;
    double per_house_min = 0.0;
    double per_house_max = 0.0;
};

LoadedBaseline load_baseline_trace(const std::string& path, double per_house_scale, double house_count,
                                   double T = 0.5);

// Daily sinusoid between per-house lo and hi (minimum at 04:00), times houses.
BaselineTrace synthetic_baseline(long periods, double T, double per_house_lo, double per_house_hi,
                                 double houses);

void write_trace_csv(const std::string& path, const SimTrace& trace);
SimTrace read_trace_csv(const std::string& path);
void write_metrics_csv(const std::string& path, const std::vector<DayMetrics>& days, double sigma_e);

}  // namespace rtp
