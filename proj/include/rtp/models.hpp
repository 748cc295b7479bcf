#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rtp {

struct CeoDemandParams {
    double D = 1.0;
    double epsilon = -0.5;

    void validate() const;
};

struct LinearSupplyParams {
    double p = 1.0;
    double q = 1.0;

    void validate() const;
};

// Price-responsive demand as seen by the ISO: value and slope.
class DemandModel {
public:
    virtual ~DemandModel() = default;
    virtual double value(double lambda) const = 0;
    virtual double derivative(double lambda) const = 0;
};

class CeoDemand final : public DemandModel {
public:
    explicit CeoDemand(CeoDemandParams params);
    double value(double lambda) const override;
    double derivative(double lambda) const override;
    const CeoDemandParams& params() const { return params_; }

private:
    CeoDemandParams params_;
};

double ceo_demand(const CeoDemandParams& params, double lambda);
double demand_derivative(const CeoDemandParams& params, double lambda);

double linear_supply(const LinearSupplyParams& params, double lambda);
double supply_inverse(const LinearSupplyParams& params, double x);
double supply_derivative(const LinearSupplyParams& params, double lambda);

double marginal_ratio(const DemandModel& demand, const LinearSupplyParams& supplier, double lambda_o);
double marginal_ratio(const CeoDemandParams& demand, const LinearSupplyParams& supplier, double lambda_o);

double calibrate_D(const LinearSupplyParams& supplier, double b, double lambda_star, double epsilon);

// Price solving s(lambda) = b + w(lambda) by bracketing bisection on [lo, hi].
double clearing_price(const LinearSupplyParams& supplier, const DemandModel& demand, double b,
                      double lo = 1e-9, double hi = 1e9);

struct Consumer {
    double D = 0.0;
    double epsilon = -0.5;
    double baseline_scale = 0.0;
    // 0 = honest; g >= 1 means the consumer's meter belongs to attack group g.
    int group = 0;

    bool compromised() const { return group > 0; }
};

struct ConsumerPopulation {
    std::vector<Consumer> consumers;

    void validate() const;
    std::size_t size() const { return consumers.size(); }
    std::size_t compromised_count() const;
    int group_count() const;
};

struct PopulationSampling {
    double D_mean = 7.0;
    double D_sd = 3.5;
    double D_min = 0.5;
    double eps_mean = -0.8;
    double eps_sd = 0.1;
    double eps_lo = -0.99;
    double eps_hi = -0.01;
    double baseline_scale = 1.0;
};

ConsumerPopulation sample_population(std::size_t n, std::uint64_t seed,
                                     const PopulationSampling& dist = {});

// Sum of the per-consumer CEO curves, all at the same price.
class PopulationDemand final : public DemandModel {
public:
    explicit PopulationDemand(const ConsumerPopulation& pop);
    double value(double lambda) const override;
    double derivative(double lambda) const override;

private:
    std::vector<CeoDemandParams> members_;
};

struct DemandBreakdown {
    double total = 0.0;
    double compromised = 0.0;
    double honest = 0.0;
};

DemandBreakdown aggregate_demand(const ConsumerPopulation& pop, double b_k, double lambda,
                                 std::optional<double> lambda_attacked = std::nullopt);

// One attacked price per group; attacked[g-1] is served to group g.
DemandBreakdown aggregate_demand(const ConsumerPopulation& pop, double b_k, double lambda,
                                 const std::vector<double>& attacked);

double rho_of(const ConsumerPopulation& pop, double lambda_attacked);

struct SupplyFit {
    LinearSupplyParams params;
    double r_squared = 0.0;
    double residual_rms = 0.0;
    double residual_max = 0.0;
    std::size_t n = 0;
};

SupplyFit fit_linear_supply(const std::vector<std::pair<double, double>>& points);

// Region-to-feeder scaling: keep `share` of the regional curve and divide it
// over population/houses feeder-sized slices.
LinearSupplyParams scale_supply(const LinearSupplyParams& regional, double houses, double share,
                                double population);

struct BaselineTrace {
    double T = 0.5;
    std::vector<double> values;

    void validate() const;
};

struct TimedValue {
    std::string timestamp;
    double value = 0.0;
};

// `timestamp,value` CSV; timestamps are either plain hours or
// "YYYY-MM-DD HH:MM[:SS]" (a 'T' separator is accepted too).
std::vector<TimedValue> read_timeseries_csv(const std::string& path);
double timestamp_hours(const std::string& ts);

// Two numeric columns after a header line.
std::vector<std::pair<double, double>> read_xy_csv(const std::string& path);

ConsumerPopulation read_population_csv(const std::string& path);
void write_population_csv(const std::string& path, const ConsumerPopulation& pop);

}  // namespace rtp
