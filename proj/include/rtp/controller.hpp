#pragma once

#include "rtp/models.hpp"

#include <string>

namespace rtp {

enum class ControllerMode { fixed, adaptive, direct_feedback };

std::string to_string(ControllerMode mode);
ControllerMode parse_controller_mode(const std::string& s);

struct ControllerConfig {
    double eta = 0.5;
    ControllerMode mode = ControllerMode::adaptive;
    double lambda_o = 20.0;
    double lambda_min = 1.0;
    double lambda_max = 200.0;
    double w_slope_error = 0.0;

    void validate() const;
    double clamp(double lambda) const;
};

// lambda_k from lambda_{k-1} and e_{k-1}; `demand` supplies the ISO's slope
// estimate (honest model, before the E_w distortion).
double stabilizing_update(const ControllerConfig& cfg, double lambda_prev, double e_prev,
                          const DemandModel& demand, const LinearSupplyParams& supplier);

double direct_feedback_update(const LinearSupplyParams& supplier, double d_prev, double lambda_min,
                              double lambda_max);

struct ErrorBound {
    double exact = 0.0;
    double conservative = 0.0;
};

ErrorBound estimation_error_bound(double eta, double s_slope, double w_slope);

enum class LoopStatus { running, converged, diverged };

// Streaming detector.  Convergence: |e| < rel_tol * s(lambda) for `hold`
// consecutive periods.  Divergence: the price sits on a bound for
// `pinned_limit` consecutive periods, or |e| exceeds blowup * s(lambda*).
class ConvergenceMonitor {
public:
    struct Options {
        double rel_tol = 1e-6;
        int hold = 5;
        int pinned_limit = 10;
        double blowup = 10.0;
    };

    ConvergenceMonitor(double lambda_min, double lambda_max, double s_star);
    ConvergenceMonitor(double lambda_min, double lambda_max, double s_star, Options opt);

    // `slack` widens the convergence band by an absolute amount (used for
    // time-varying baselines, where each period brings a fresh innovation).
    LoopStatus update(double lambda, double e, double s_lambda, double slack = 0.0);
    LoopStatus status() const { return status_; }
    long converged_at() const { return converged_at_; }
    long diverged_at() const { return diverged_at_; }
    bool currently_settled() const { return calm_ >= opt_.hold; }

private:
    double lambda_min_;
    double lambda_max_;
    double s_star_;
    Options opt_;
    int calm_ = 0;
    int pinned_ = 0;
    long k_ = -1;
    long converged_at_ = -1;
    long diverged_at_ = -1;
    LoopStatus status_ = LoopStatus::running;
};

}  // namespace rtp
