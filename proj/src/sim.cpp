#include "rtp/sim.hpp"
#include "rtp/errors.hpp"
#include "rtp/parallel.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace rtp {

std::string to_string(RunClass c) {
    switch (c) {
    case RunClass::converged: return "converged";
    case RunClass::converging: return "converging";
    case RunClass::oscillating: return "oscillating";
    case RunClass::diverging: return "diverging";
    case RunClass::diverged: return "diverged";
    }
    return "?";
}

void SimConfig::validate() const {
    if (!(T > 0.0)) throw config_error("simulation: T must be positive");
    if (horizon < 1) throw config_error("simulation: horizon must be at least 1");
    supplier.validate();
    if (population) population->validate();
    else demand.validate();
    controller.validate();
    attack.validate();
    if (!(lambda0 >= controller.lambda_min && lambda0 <= controller.lambda_max))
        throw config_error("simulation: lambda0 must lie within the price bounds");
    if (baseline) {
        baseline->validate();
        if (static_cast<long>(baseline->values.size()) < horizon)
            throw config_error("simulation: baseline trace has " + std::to_string(baseline->values.size()) +
                               " periods, horizon needs " + std::to_string(horizon));
        if (std::abs(baseline->T - T) > 1e-9) throw config_error("simulation: baseline period differs from T");
    } else if (!(baseline_constant >= 0.0)) {
        throw config_error("simulation: baseline must be non-negative");
    }
    if (feeder_rating && !(*feeder_rating > 0.0)) throw config_error("simulation: feeder rating must be positive");
    if (mean_h_window < 0) throw config_error("simulation: mean_h_window must be >= 0");
}

long SimConfig::periods_per_day() const { return std::max(1L, std::lround(24.0 / T)); }

double SimConfig::baseline_at(long k) const {
    return baseline ? baseline->values[static_cast<std::size_t>(k)] : baseline_constant;
}

const DemandModel& iso_demand_model(const SimConfig& cfg, CeoDemand& ceo_storage,
                                    std::optional<PopulationDemand>& pop_storage) {
    if (cfg.population) {
        pop_storage.emplace(*cfg.population);
        return *pop_storage;
    }
    ceo_storage = CeoDemand(cfg.demand);
    return ceo_storage;
}

double reference_supply(const SimConfig& cfg) {
    CeoDemand ceo(cfg.population ? CeoDemandParams{1.0, -0.5} : cfg.demand);
    std::optional<PopulationDemand> pop;
    const DemandModel& w = iso_demand_model(cfg, ceo, pop);
    try {
        double ls = clearing_price(cfg.supplier, w, cfg.baseline_at(0), 1e-9, 1e12);
        return linear_supply(cfg.supplier, ls);
    } catch (const std::exception&) {
        return linear_supply(cfg.supplier, cfg.lambda0);
    }
}

namespace {

struct Classified {
    RunClass status;
    double ratio;
};

Classified classify_tail(const SimTrace& tr, long start, bool diverged, bool settled) {
    if (diverged) return {RunClass::diverged, 1.0};
    if (settled) return {RunClass::converged, 0.0};
    const long H = static_cast<long>(tr.size());
    const long L = H - std::max(0L, start);
    if (L < 8) return {RunClass::oscillating, 1.0};
    auto env = [&](long from, long to) {
        double m = 0.0;
        for (long k = from; k < to; ++k) m = std::max(m, std::abs(tr[static_cast<std::size_t>(k)].error));
        return m;
    };
    const double a = env(H - L / 2, H - L / 4), b = env(H - L / 4, H);
    const double r = a > 0.0 ? b / a : (b > 0.0 ? INFINITY : 1.0);
    if (r > 1.05) return {RunClass::diverging, r};
    if (r < 0.95) return {RunClass::converging, r};
    return {RunClass::oscillating, r};
}

}  // namespace

SimResult run(const SimConfig& cfg) {
    cfg.validate();
    std::optional<ConsumerPopulation> pop = cfg.population;
    const auto groups = cfg.attack.effective_groups();
    if (pop && !groups.empty() && pop->group_count() == 0) assign_compromised(*pop, cfg.attack, cfg.seed);

    CeoDemand ceo(pop ? CeoDemandParams{1.0, -0.5} : cfg.demand);
    std::optional<PopulationDemand> pop_model;
    SimConfig iso_cfg = cfg;
    iso_cfg.population = pop;
    const DemandModel& iso = iso_demand_model(iso_cfg, ceo, pop_model);
    const double s_ref = reference_supply(iso_cfg);
    const auto& ctl = cfg.controller;

    ConvergenceMonitor monitor(ctl.lambda_min, ctl.lambda_max, s_ref);
    AttackSpec spec = cfg.attack;
    const bool auto_start = spec.start_k == kAttackAfterConvergence;
    if (auto_start) spec.start_k = LONG_MAX;
    const double rho_total = cfg.attack.total_rho();

    SimResult res;
    res.trace.reserve(static_cast<std::size_t>(cfg.horizon));
    std::vector<double> hist;
    hist.reserve(static_cast<std::size_t>(cfg.horizon) + 1);
    hist.push_back(cfg.lambda0);

    for (long k = 0; k < cfg.horizon; ++k) {
        try {
            TraceRow row;
            row.k = k;
            row.lambda = hist.back();
            row.b = cfg.baseline_at(k);
            row.lambda_attacked = apply_attack(spec, hist, k);
            if (pop) {
                DemandBreakdown d = aggregate_demand(*pop, row.b, row.lambda,
                                                     groups.empty() ? std::vector<double>{} : row.lambda_attacked);
                row.demand_honest = d.honest;
                row.demand_compromised = d.compromised;
            } else {
                row.demand_honest = (1.0 - rho_total) * ceo_demand(cfg.demand, row.lambda);
                row.demand_compromised = 0.0;
                for (std::size_t g = 0; g < groups.size(); ++g)
                    row.demand_compromised += groups[g].rho * ceo_demand(cfg.demand, row.lambda_attacked[g]);
            }
            row.demand_total = row.b + row.demand_honest + row.demand_compromised;
            row.supply_scheduled = linear_supply(cfg.supplier, row.lambda);
            row.error = row.supply_scheduled - row.demand_total;
            const double lo = ctl.mode == ControllerMode::fixed ? ctl.lambda_o : row.lambda;
            row.h = marginal_ratio(iso, cfg.supplier, lo);

            // A moving baseline leaves an error of about one period's change
            // even at the clearing price; that much is not counted against
            // convergence.
            const double slack = k > 0 ? 2.0 * std::abs(row.b - cfg.baseline_at(k - 1)) : 0.0;
            const LoopStatus st = monitor.update(row.lambda, row.error, row.supply_scheduled, slack);
            if (auto_start && st == LoopStatus::converged && spec.start_k == LONG_MAX)
                spec.start_k = k + 1 + (cfg.trace_driven() ? cfg.periods_per_day() : 0);

            double next;
            if (ctl.mode == ControllerMode::direct_feedback)
                next = row.demand_total > cfg.supplier.q
                           ? direct_feedback_update(cfg.supplier, row.demand_total, ctl.lambda_min, ctl.lambda_max)
                           : ctl.lambda_min;
            else
                next = stabilizing_update(ctl, row.lambda, row.error, iso, cfg.supplier);
            hist.push_back(next);
            res.trace.push_back(std::move(row));
        } catch (const domain_error& e) {
            throw domain_error("period " + std::to_string(k) + ": " + e.what());
        } catch (const controller_error& e) {
            throw controller_error("period " + std::to_string(k) + ": " + e.what());
        }
    }

    res.converged_at = monitor.converged_at();
    res.diverged_at = monitor.diverged_at();
    const bool attacked = !groups.empty();
    res.attack_start = attacked && spec.start_k < cfg.horizon ? std::max(0L, spec.start_k) : -1;
    const long window_start = res.attack_start >= 0 ? res.attack_start : 0;

    double hs = 0.0;
    long hn = 0;
    const long h_from = cfg.mean_h_window > 0 ? 0 : window_start;
    const long h_to = cfg.mean_h_window > 0 ? std::min(cfg.mean_h_window, cfg.horizon) : cfg.horizon;
    for (long k = h_from; k < h_to; ++k, ++hn) hs += res.trace[static_cast<std::size_t>(k)].h;
    res.mean_h = hn > 0 ? hs / static_cast<double>(hn) : 0.0;
    res.sigma_e = volatility(res.trace, window_start);

    const bool diverged = monitor.status() == LoopStatus::diverged;
    if (cfg.trace_driven()) {
        // The baseline keeps moving, so the error never settles; compare the
        // volatility against the same trace without attack instead.
        double benign = res.sigma_e;
        if (attacked && res.attack_start >= 0) {
            SimConfig b = cfg;
            b.attack = no_attack();
            b.population = pop;
            if (b.population) for (auto& c : b.population->consumers) c.group = 0;
            benign = volatility(run(b).trace, window_start);
        }
        res.convergent = !diverged && res.sigma_e <= 2.0 * benign + 1e-12 * s_ref;
        res.status = diverged ? RunClass::diverged : (res.convergent ? RunClass::converged : RunClass::oscillating);
        res.envelope_ratio = benign > 0.0 ? res.sigma_e / benign : 1.0;
    } else {
        const Classified c = classify_tail(res.trace, window_start, diverged, monitor.currently_settled());
        res.status = c.status;
        res.envelope_ratio = c.ratio;
        res.convergent = c.status == RunClass::converged || c.status == RunClass::converging;
    }
    return res;
}

double volatility(const SimTrace& trace, long attack_start) {
    const long n = static_cast<long>(trace.size()) - std::max(0L, attack_start);
    if (attack_start < 0 || n <= 0) throw domain_error("volatility: empty window");
    double mean = 0.0;
    for (long k = attack_start; k < static_cast<long>(trace.size()); ++k) mean += trace[static_cast<std::size_t>(k)].error;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (long k = attack_start; k < static_cast<long>(trace.size()); ++k) {
        const double d = trace[static_cast<std::size_t>(k)].error - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(n));
}

std::vector<DayMetrics> feeder_events(const SimTrace& trace, double rating, long periods_per_day) {
    if (!(rating > 0.0)) throw domain_error("feeder_events: rating must be positive");
    if (periods_per_day < 1) throw domain_error("feeder_events: periods_per_day must be positive");
    std::vector<DayMetrics> days;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const long day = static_cast<long>(i) / periods_per_day;
        if (static_cast<long>(days.size()) <= day) days.push_back({day, 0.0, 0.0});
        const double over = std::max(0.0, (trace[i].demand_total - rating) / rating) * 100.0;
        if (over > 0.0) days.back().emergency_frequency += 1.0;
        days.back().max_overload_pct = std::max(days.back().max_overload_pct, over);
    }
    for (auto& d : days) d.emergency_frequency /= static_cast<double>(periods_per_day);
    return days;
}

double default_feeder_rating(const SimConfig& cfg) {
    SimConfig benign = cfg;
    benign.attack = no_attack();
    if (benign.population) for (auto& c : benign.population->consumers) c.group = 0;
    const SimResult r = run(benign);
    double peak = 0.0;
    for (const auto& row : r.trace) peak = std::max(peak, row.demand_total);
    return 1.25 * peak;
}

double convergence_probability(const LinearSupplyParams& supplier, double b, double epsilon,
                               double lambda_star, const ProbabilityOptions& opt) {
    const double D = calibrate_D(supplier, b, lambda_star, epsilon);
    const CeoDemandParams w{D, epsilon};
    const CeoDemand model(w);
    ControllerConfig ctl;
    ctl.mode = opt.mode;
    ctl.eta = opt.eta;
    ctl.lambda_min = opt.lambda_min;
    ctl.lambda_max = opt.lambda_max;
    const double s_star = linear_supply(supplier, lambda_star);
    const int n = std::max(opt.prices, 2);
    // Extreme starting prices carry a large first error by construction; only
    // pinning or failing to settle count against a start.
    ConvergenceMonitor::Options probe;
    probe.blowup = INFINITY;
    int converged = 0;
    for (int i = 0; i < n; ++i) {
        double lam = opt.lambda_min + (opt.lambda_max - opt.lambda_min) * i / (n - 1.0);
        ConvergenceMonitor mon(opt.lambda_min, opt.lambda_max, s_star, probe);
        for (int k = 0; k < opt.max_periods; ++k) {
            const double d = b + ceo_demand(w, lam);
            const double s = linear_supply(supplier, lam);
            const LoopStatus st = mon.update(lam, s - d, s);
            if (st == LoopStatus::converged) {
                ++converged;
                break;
            }
            if (st == LoopStatus::diverged) break;
            if (opt.mode == ControllerMode::direct_feedback)
                lam = d > supplier.q ? direct_feedback_update(supplier, d, opt.lambda_min, opt.lambda_max)
                                     : opt.lambda_min;
            else
                lam = stabilizing_update(ctl, lam, s - d, model, supplier);
        }
    }
    return static_cast<double>(converged) / n;
}

std::vector<MapCell> stability_map(const LinearSupplyParams& supplier, double b,
                                   const std::vector<double>& epsilons,
                                   const std::vector<double>& lambda_stars,
                                   const ProbabilityOptions& opt, int workers) {
    std::vector<MapCell> cells(epsilons.size() * lambda_stars.size());
    for (std::size_t i = 0; i < epsilons.size(); ++i)
        for (std::size_t j = 0; j < lambda_stars.size(); ++j)
            cells[i * lambda_stars.size() + j] = {epsilons[i], lambda_stars[j], 0.0};
    parallel_for(cells.size(), workers, [&](std::size_t c) {
        cells[c].probability = convergence_probability(supplier, b, cells[c].epsilon, cells[c].lambda_star, opt);
    });
    return cells;
}

LoadedBaseline load_baseline_trace(const std::string& path, double per_house_scale, double house_count,
                                   double T) {
    if (!(per_house_scale > 0.0) || !(house_count > 0.0))
        throw config_error("load_baseline_trace: scale and house count must be positive");
    const auto rows = read_timeseries_csv(path);
    if (rows.empty()) throw ingestion_error(path + ": no data rows");
    LoadedBaseline out;
    out.trace.T = T;
    out.trace.values.reserve(rows.size());
    double prev_t = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const long row = static_cast<long>(i) + 2;
        const double t = timestamp_hours(rows[i].timestamp);
        if (i > 0 && std::abs((t - prev_t) - T) > 1e-6)
            throw ingestion_error(path + ": spacing of " + std::to_string(t - prev_t) + " h, expected " +
                                  std::to_string(T) + " h", row);
        prev_t = t;
        if (rows[i].value < 0.0) throw ingestion_error(path + ": negative value", row);
        const double per_house = rows[i].value * per_house_scale;
        if (i == 0) out.per_house_min = out.per_house_max = per_house;
        out.per_house_min = std::min(out.per_house_min, per_house);
        out.per_house_max = std::max(out.per_house_max, per_house);
        out.trace.values.push_back(per_house * house_count);
    }
    return out;
}

BaselineTrace synthetic_baseline(long periods, double T, double per_house_lo, double per_house_hi,
                                 double houses) {
    if (periods < 1 || !(T > 0.0) || !(per_house_lo >= 0.0) || !(per_house_hi >= per_house_lo))
        throw config_error("synthetic_baseline: invalid arguments");
    BaselineTrace tr;
    tr.T = T;
    const double mid = 0.5 * (per_house_lo + per_house_hi), amp = 0.5 * (per_house_hi - per_house_lo);
    for (long k = 0; k < periods; ++k) {
        const double t = static_cast<double>(k) * T;
        tr.values.push_back(houses * (mid - amp * std::cos(2.0 * std::numbers::pi * (t - 4.0) / 24.0)));
    }
    return tr;
}

void write_trace_csv(const std::string& path, const SimTrace& trace) {
    std::ofstream out(path);
    if (!out) throw ingestion_error("cannot write " + path);
    out << "k,lambda,lambda_attacked,b,demand_honest,demand_compromised,demand_total,supply_scheduled,error,h\n";
    char buf[512];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.k, r.lambda,
                      r.lambda_attacked.empty() ? r.lambda : r.lambda_attacked.front(), r.b, r.demand_honest,
                      r.demand_compromised, r.demand_total, r.supply_scheduled, r.error, r.h);
        out << buf;
    }
}

SimTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ingestion_error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    if (line != "k,lambda,lambda_attacked,b,demand_honest,demand_compromised,demand_total,supply_scheduled,error,h")
        throw ingestion_error(path + ": unexpected trace header", 1);
    SimTrace out;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        TraceRow r;
        double la = 0.0;
        int n = std::sscanf(line.c_str(), "%ld,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.k, &r.lambda, &la, &r.b,
                            &r.demand_honest, &r.demand_compromised, &r.demand_total, &r.supply_scheduled, &r.error,
                            &r.h);
        if (n != 10) throw ingestion_error(path + ": malformed trace row", row);
        r.lambda_attacked = {la};
        out.push_back(std::move(r));
    }
    return out;
}

void write_metrics_csv(const std::string& path, const std::vector<DayMetrics>& days, double sigma_e) {
    std::ofstream out(path);
    if (!out) throw ingestion_error("cannot write " + path);
    char buf[256];
    std::snprintf(buf, sizeof buf, "# sigma_e,%.17g\n", sigma_e);
    out << buf << "day,emergency_frequency,max_overload_pct\n";
    for (const auto& d : days) {
        std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", d.day, d.emergency_frequency, d.max_overload_pct);
        out << buf;
    }
}

}  // namespace rtp
