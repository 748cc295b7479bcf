#include "rtp/controller.hpp"
#include "rtp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rtp {

std::string to_string(ControllerMode mode) {
    switch (mode) {
    case ControllerMode::fixed: return "fixed";
    case ControllerMode::adaptive: return "adaptive";
    case ControllerMode::direct_feedback: return "direct-feedback";
    }
    return "?";
}

ControllerMode parse_controller_mode(const std::string& s) {
    if (s == "fixed") return ControllerMode::fixed;
    if (s == "adaptive") return ControllerMode::adaptive;
    if (s == "direct-feedback" || s == "direct_feedback") return ControllerMode::direct_feedback;
    throw config_error("unknown controller mode '" + s + "'");
}

void ControllerConfig::validate() const {
    if (mode != ControllerMode::direct_feedback && !(eta > 0.0 && eta < 1.0))
        throw config_error("controller: eta must lie in (0, 1)");
    if (!(lambda_min > 0.0 && lambda_min < lambda_max))
        throw config_error("controller: need 0 < lambda_min < lambda_max");
    if (mode == ControllerMode::fixed && !(lambda_o >= lambda_min && lambda_o <= lambda_max))
        throw config_error("controller: lambda_o must lie within the price bounds");
    if (!(w_slope_error < 1.0)) throw config_error("controller: w_slope_error must be < 1");
}

double ControllerConfig::clamp(double lambda) const {
    return std::clamp(lambda, lambda_min, lambda_max);
}

double stabilizing_update(const ControllerConfig& cfg, double lambda_prev, double e_prev,
                          const DemandModel& demand, const LinearSupplyParams& supplier) {
    if (cfg.mode == ControllerMode::direct_feedback)
        throw controller_error("stabilizing_update called with the direct-feedback mode");
    const double lo = cfg.mode == ControllerMode::fixed ? cfg.lambda_o : lambda_prev;
    const double ds = supply_derivative(supplier, lo);
    const double dw = (1.0 - cfg.w_slope_error) * demand.derivative(lo);
    const double denom = ds - dw;
    if (!(denom > 0.0) || !std::isfinite(denom))
        throw controller_error("stabilizing_update: non-positive slope denominator at lambda_o = " +
                               std::to_string(lo));
    return cfg.clamp(lambda_prev - 2.0 * cfg.eta * e_prev / denom);
}

double direct_feedback_update(const LinearSupplyParams& supplier, double d_prev, double lambda_min,
                              double lambda_max) {
    if (!(d_prev > supplier.q))
        throw domain_error("direct_feedback_update: demand " + std::to_string(d_prev) +
                           " is not above the supply intercept; clamped price would be " +
                           std::to_string(lambda_min));
    return std::clamp(supply_inverse(supplier, d_prev), lambda_min, lambda_max);
}

ErrorBound estimation_error_bound(double eta, double s_slope, double w_slope) {
    ErrorBound b;
    b.conservative = 1.0 - eta;
    b.exact = (1.0 - eta) * (1.0 - s_slope / w_slope);
    return b;
}

ConvergenceMonitor::ConvergenceMonitor(double lambda_min, double lambda_max, double s_star)
    : ConvergenceMonitor(lambda_min, lambda_max, s_star, Options{}) {}

ConvergenceMonitor::ConvergenceMonitor(double lambda_min, double lambda_max, double s_star, Options opt)
    : lambda_min_(lambda_min), lambda_max_(lambda_max), s_star_(s_star), opt_(opt) {}

LoopStatus ConvergenceMonitor::update(double lambda, double e, double s_lambda, double slack) {
    ++k_;
    if (status_ == LoopStatus::diverged) return status_;

    calm_ = std::abs(e) < opt_.rel_tol * s_lambda + slack ? calm_ + 1 : 0;
    pinned_ = (lambda <= lambda_min_ || lambda >= lambda_max_) ? pinned_ + 1 : 0;

    if (pinned_ >= opt_.pinned_limit || !(std::abs(e) <= opt_.blowup * s_star_)) {
        status_ = LoopStatus::diverged;
        diverged_at_ = k_;
        return status_;
    }
    if (calm_ >= opt_.hold) {
        if (converged_at_ < 0) converged_at_ = k_;
        status_ = LoopStatus::converged;
    } else {
        status_ = LoopStatus::running;
    }
    return status_;
}

}  // namespace rtp
