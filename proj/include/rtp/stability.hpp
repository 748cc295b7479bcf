#pragma once

#include "rtp/char_poly.hpp"
#include "rtp/jury.hpp"
#include "rtp/ratpoly.hpp"

#include <utility>
#include <vector>

namespace rtp {

double scaling_eta_bar(double h, double rho, double gamma, double mu);
double scaling_ros_limit(double rho, double gamma, double mu);

// Attack family with its fixed parameters; h and eta vary.
struct FamilyParams {
    PolyFamily family = PolyFamily::delay;
    double rho = 1.0;
    int tau = 1;
    double gamma = 1.0;
    double mu = 1.0;

    void validate() const;
    CharPoly poly(double h, double eta) const;
};

struct BoundaryOptions {
    int scan_points = 200;
    double tol = 1e-5;
    int workers = 1;
};

struct BoundaryPoint {
    double h = 0.0;
    double eta_bar = 0.0;
    // False when the eta scan found more than one stable/unstable switch; the
    // stable set is then listed in `intervals` and eta_bar is the sup of the
    // first interval that starts at the bottom of the scan (0 if none does).
    bool single_crossing = true;
    std::vector<std::pair<double, double>> intervals;
};

struct StabilityBoundary {
    FamilyParams params;
    std::vector<BoundaryPoint> samples;
    bool non_increasing = true;
};

BoundaryPoint eta_bar_at(const FamilyParams& fp, double h, const BoundaryOptions& opt = {});
StabilityBoundary boundary_curve(const FamilyParams& fp, const std::vector<double>& h_grid,
                                 const BoundaryOptions& opt = {});

// Bisection on h for a fixed eta: the switch between a stable h_lo and an
// unstable h_hi (or the reverse).  Throws analysis_error if the bracket does
// not straddle a switch.
double critical_h(const FamilyParams& fp, double eta, double h_lo, double h_hi, double tol = 1e-10);

// Solve scaling_eta_bar(h) = eta for h; requires gamma*mu > 1.
double scaling_critical_h(double eta, double rho, double gamma, double mu);

struct DelayLimitPoly {
    QPoly Q;         // numerator of the reduced condition in eta
    QPoly den;       // denominator (constant when every division was exact)
    int iterations = 0;
};

DelayLimitPoly delay_limit_polynomial(const mpq_class& rho, int tau);
double delay_ros_limit(double rho, int tau);
double delay_ros_limit(const mpq_class& rho, int tau);

// Smallest root of p in (0, 1) by a sign scan on `grid` cells followed by
// bisection; points where `den` vanishes are skipped.  Returns 1 if none.
double min_root_unit_interval(const QPoly& p, const QPoly& den, int grid = 10000, double tol = 1e-10);

bool ros_nesting_check(double rho, int tau, const std::vector<double>& h_grid,
                       const BoundaryOptions& opt = {});

}  // namespace rtp
