#include "rtp/models.hpp"
#include "rtp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace rtp {

namespace {

void require_price(double lambda, const char* who) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw domain_error(std::string(who) + ": price must be positive and finite, got " +
                           std::to_string(lambda));
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, long row) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ingestion_error("not a finite number: '" + s + "'", row);
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ingestion_error("cannot open " + path);
    return in;
}

}  // namespace

void CeoDemandParams::validate() const {
    if (!(D > 0.0) || !std::isfinite(D)) throw domain_error("CEO demand: D must be positive");
    if (!(epsilon > -1.0 && epsilon < 0.0))
        throw domain_error("CEO demand: epsilon must lie in (-1, 0)");
}

void LinearSupplyParams::validate() const {
    if (!(p > 0.0) || !std::isfinite(p)) throw domain_error("linear supply: p must be positive");
    if (!(q > 0.0) || !std::isfinite(q)) throw domain_error("linear supply: q must be positive");
}

double ceo_demand(const CeoDemandParams& params, double lambda) {
    require_price(lambda, "ceo_demand");
    return params.D * std::pow(lambda, params.epsilon);
}

double demand_derivative(const CeoDemandParams& params, double lambda) {
    require_price(lambda, "demand_derivative");
    return params.D * params.epsilon * std::pow(lambda, params.epsilon - 1.0);
}

double linear_supply(const LinearSupplyParams& params, double lambda) {
    require_price(lambda, "linear_supply");
    return params.p * lambda + params.q;
}

double supply_inverse(const LinearSupplyParams& params, double x) {
    if (!(x > params.q))
        throw domain_error("supply_inverse: quantity must exceed the intercept q");
    return (x - params.q) / params.p;
}

double supply_derivative(const LinearSupplyParams& params, double lambda) {
    require_price(lambda, "supply_derivative");
    return params.p;
}

CeoDemand::CeoDemand(CeoDemandParams params) : params_(params) { params_.validate(); }

double CeoDemand::value(double lambda) const { return ceo_demand(params_, lambda); }

double CeoDemand::derivative(double lambda) const { return demand_derivative(params_, lambda); }

double marginal_ratio(const DemandModel& demand, const LinearSupplyParams& supplier, double lambda_o) {
    double ds = supply_derivative(supplier, lambda_o);
    if (ds == 0.0) throw domain_error("marginal_ratio: supply slope is zero");
    return std::abs(demand.derivative(lambda_o) / ds);
}

double marginal_ratio(const CeoDemandParams& demand, const LinearSupplyParams& supplier,
                      double lambda_o) {
    return marginal_ratio(CeoDemand(demand), supplier, lambda_o);
}

double calibrate_D(const LinearSupplyParams& supplier, double b, double lambda_star, double epsilon) {
    require_price(lambda_star, "calibrate_D");
    double D = (supplier.p * lambda_star + supplier.q - b) / std::pow(lambda_star, epsilon);
    if (!(D > 0.0))
        throw calibration_error("calibrate_D: baseline " + std::to_string(b) +
                                " leaves no price-responsive demand at lambda* = " +
                                std::to_string(lambda_star));
    return D;
}

double clearing_price(const LinearSupplyParams& supplier, const DemandModel& demand, double b,
                      double lo, double hi) {
    // f is strictly increasing: supply rises, demand falls.
    auto f = [&](double x) { return linear_supply(supplier, x) - b - demand.value(x); };
    double flo = f(lo), fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0) throw calibration_error("clearing_price: no sign change on bracket");
    for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
}

void ConsumerPopulation::validate() const {
    if (consumers.empty()) throw domain_error("population is empty");
    for (const auto& c : consumers) {
        CeoDemandParams{c.D, c.epsilon}.validate();
        if (!(c.baseline_scale >= 0.0)) throw domain_error("baseline_scale must be >= 0");
        if (c.group < 0) throw domain_error("negative attack group");
    }
}

std::size_t ConsumerPopulation::compromised_count() const {
    return static_cast<std::size_t>(
        std::count_if(consumers.begin(), consumers.end(), [](const Consumer& c) { return c.compromised(); }));
}

int ConsumerPopulation::group_count() const {
    int g = 0;
    for (const auto& c : consumers) g = std::max(g, c.group);
    return g;
}

ConsumerPopulation sample_population(std::size_t n, std::uint64_t seed, const PopulationSampling& dist) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d_dist(dist.D_mean, dist.D_sd);
    std::normal_distribution<double> e_dist(dist.eps_mean, dist.eps_sd);
    ConsumerPopulation pop;
    pop.consumers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Consumer c;
        do { c.D = d_dist(rng); } while (c.D < dist.D_min);
        do { c.epsilon = e_dist(rng); } while (!(c.epsilon > dist.eps_lo && c.epsilon < dist.eps_hi));
        c.baseline_scale = dist.baseline_scale;
        pop.consumers.push_back(c);
    }
    return pop;
}

PopulationDemand::PopulationDemand(const ConsumerPopulation& pop) {
    pop.validate();
    members_.reserve(pop.size());
    for (const auto& c : pop.consumers) members_.push_back({c.D, c.epsilon});
}

double PopulationDemand::value(double lambda) const {
    require_price(lambda, "PopulationDemand");
    double sum = 0.0;
    for (const auto& m : members_) sum += m.D * std::pow(lambda, m.epsilon);
    return sum;
}

double PopulationDemand::derivative(double lambda) const {
    require_price(lambda, "PopulationDemand");
    double sum = 0.0;
    for (const auto& m : members_) sum += m.D * m.epsilon * std::pow(lambda, m.epsilon - 1.0);
    return sum;
}

DemandBreakdown aggregate_demand(const ConsumerPopulation& pop, double b_k, double lambda,
                                 const std::vector<double>& attacked) {
    require_price(lambda, "aggregate_demand");
    for (double a : attacked) require_price(a, "aggregate_demand");
    DemandBreakdown out;
    for (const auto& c : pop.consumers) {
        if (c.group > 0 && static_cast<std::size_t>(c.group) <= attacked.size())
            out.compromised += c.D * std::pow(attacked[c.group - 1], c.epsilon);
        else if (c.group > 0)
            out.compromised += c.D * std::pow(lambda, c.epsilon);
        else
            out.honest += c.D * std::pow(lambda, c.epsilon);
    }
    out.total = b_k + out.honest + out.compromised;
    return out;
}

DemandBreakdown aggregate_demand(const ConsumerPopulation& pop, double b_k, double lambda,
                                 std::optional<double> lambda_attacked) {
    std::vector<double> attacked;
    if (lambda_attacked) attacked.assign(static_cast<std::size_t>(std::max(1, pop.group_count())), *lambda_attacked);
    return aggregate_demand(pop, b_k, lambda, attacked);
}

double rho_of(const ConsumerPopulation& pop, double lambda_attacked) {
    require_price(lambda_attacked, "rho_of");
    if (pop.consumers.empty()) throw domain_error("rho_of: empty population");
    double num = 0.0, den = 0.0;
    for (const auto& c : pop.consumers) {
        double w = c.D * std::pow(lambda_attacked, c.epsilon);
        den += w;
        if (c.compromised()) num += w;
    }
    if (!(den > 0.0)) throw domain_error("rho_of: zero price-responsive demand");
    return num / den;
}

SupplyFit fit_linear_supply(const std::vector<std::pair<double, double>>& points) {
    const std::size_t n = points.size();
    if (n < 2) throw fit_error("fit_linear_supply: need at least two points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) { mx += x; my += y; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) throw fit_error("fit_linear_supply: all prices are identical");
    SupplyFit fit;
    fit.n = n;
    fit.params.p = sxy / sxx;
    fit.params.q = my - fit.params.p * mx;
    double ss_res = 0.0;
    for (const auto& [x, y] : points) {
        double r = y - (fit.params.p * x + fit.params.q);
        ss_res += r * r;
        fit.residual_max = std::max(fit.residual_max, std::abs(r));
    }
    fit.residual_rms = std::sqrt(ss_res / static_cast<double>(n));
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

LinearSupplyParams scale_supply(const LinearSupplyParams& regional, double houses, double share,
                                double population) {
    if (!(houses > 0.0) || !(population > 0.0) || !(share > 0.0))
        throw domain_error("scale_supply: houses, share and population must be positive");
    double slices = population / houses;
    return {share * regional.p / slices, share * regional.q / slices};
}

void BaselineTrace::validate() const {
    if (!(T > 0.0)) throw domain_error("baseline trace: period must be positive");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw domain_error("baseline trace: value " + std::to_string(i) + " is negative or not finite");
}

double timestamp_hours(const std::string& ts) {
    // Plain number: already in hours.
    try {
        std::size_t used = 0;
        double v = std::stod(ts, &used);
        if (used == ts.size()) return v;
    } catch (const std::exception&) {
    }
    int Y, M, D, h, m;
    double s = 0.0;
    char sep;
    int n = std::sscanf(ts.c_str(), "%d-%d-%d%c%d:%d:%lf", &Y, &M, &D, &sep, &h, &m, &s);
    if (n < 6 || (sep != ' ' && sep != 'T')) throw std::invalid_argument("bad timestamp: " + ts);
    // Days from civil, proleptic Gregorian.
    Y -= M <= 2;
    const int era = (Y >= 0 ? Y : Y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(Y - era * 400);
    const unsigned doy = (153 * (M + (M > 2 ? -3 : 9)) + 2) / 5 + D - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    const long days = era * 146097L + static_cast<long>(doe) - 719468L;
    return days * 24.0 + h + m / 60.0 + s / 3600.0;
}

std::vector<TimedValue> read_timeseries_csv(const std::string& path) {
    auto in = open_or_throw(path);
    std::string line;
    long row = 0;
    if (!std::getline(in, line)) throw ingestion_error(path + ": empty file");
    ++row;
    auto header = split_csv_line(line);
    if (header.size() != 2 || header[0] != "timestamp" || header[1] != "value")
        throw ingestion_error(path + ": expected header 'timestamp,value'", row);
    std::vector<TimedValue> out;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2) throw ingestion_error(path + ": expected 2 columns", row);
        TimedValue tv{cells[0], parse_number(cells[1], row)};
        try {
            (void)timestamp_hours(tv.timestamp);
        } catch (const std::exception&) {
            throw ingestion_error(path + ": unreadable timestamp '" + tv.timestamp + "'", row);
        }
        out.push_back(std::move(tv));
    }
    return out;
}

std::vector<std::pair<double, double>> read_xy_csv(const std::string& path) {
    auto in = open_or_throw(path);
    std::string line;
    long row = 0;
    if (!std::getline(in, line)) throw ingestion_error(path + ": empty file");
    ++row;
    if (split_csv_line(line).size() != 2) throw ingestion_error(path + ": expected a 2-column header", row);
    std::vector<std::pair<double, double>> out;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2) throw ingestion_error(path + ": expected 2 columns", row);
        out.emplace_back(parse_number(cells[0], row), parse_number(cells[1], row));
    }
    return out;
}

ConsumerPopulation read_population_csv(const std::string& path) {
    auto in = open_or_throw(path);
    std::string line;
    long row = 0;
    if (!std::getline(in, line)) throw ingestion_error(path + ": empty file");
    ++row;
    auto header = split_csv_line(line);
    const std::vector<std::string> want{"D", "epsilon", "baseline_scale", "compromised"};
    if (header != want)
        throw ingestion_error(path + ": expected header 'D,epsilon,baseline_scale,compromised'", row);
    ConsumerPopulation pop;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 4) throw ingestion_error(path + ": expected 4 columns", row);
        Consumer c;
        c.D = parse_number(cells[0], row);
        c.epsilon = parse_number(cells[1], row);
        c.baseline_scale = parse_number(cells[2], row);
        double g = parse_number(cells[3], row);
        if (g < 0 || g != std::floor(g)) throw ingestion_error(path + ": compromised must be 0/1 or a group number", row);
        c.group = static_cast<int>(g);
        try {
            CeoDemandParams{c.D, c.epsilon}.validate();
        } catch (const domain_error& e) {
            throw ingestion_error(path + ": " + e.what(), row);
        }
        if (c.baseline_scale < 0) throw ingestion_error(path + ": negative baseline_scale", row);
        pop.consumers.push_back(c);
    }
    if (pop.consumers.empty()) throw ingestion_error(path + ": no consumers");
    return pop;
}

void write_population_csv(const std::string& path, const ConsumerPopulation& pop) {
    std::ofstream out(path);
    if (!out) throw ingestion_error("cannot write " + path);
    out << "D,epsilon,baseline_scale,compromised\n";
    char buf[128];
    for (const auto& c : pop.consumers) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d\n", c.D, c.epsilon, c.baseline_scale, c.group);
        out << buf;
    }
}

}  // namespace rtp
