#include "rtp/stability.hpp"
#include "rtp/errors.hpp"
#include "rtp/parallel.hpp"

#include <gmpxx.h>

#include <cmath>

namespace rtp {

double scaling_eta_bar(double h, double rho, double gamma, double mu) {
    if (!(h > 0.0)) throw domain_error("scaling_eta_bar: h must be positive");
    if (!(rho > 0.0 && rho <= 1.0)) throw domain_error("scaling_eta_bar: rho must lie in (0, 1]");
    const double gm = gamma * mu;
    if (!(gm > 0.0)) throw domain_error("scaling_eta_bar: gamma*mu must be positive");
    const double den = h + 1.0 + rho * h * (gm - 1.0);
    if (!(den > 0.0)) throw domain_error("scaling_eta_bar: non-positive denominator");
    return (h + 1.0) / den;
}

double scaling_ros_limit(double rho, double gamma, double mu) {
    if (!(rho > 0.0 && rho <= 1.0)) throw domain_error("scaling_ros_limit: rho must lie in (0, 1]");
    const double gm = gamma * mu;
    if (!(gm > 0.0)) throw domain_error("scaling_ros_limit: gamma*mu must be positive");
    if (gm <= 1.0) return 1.0;
    return 1.0 / (1.0 + rho * (gm - 1.0));
}

double scaling_critical_h(double eta, double rho, double gamma, double mu) {
    const double gm = gamma * mu;
    const double den = eta * rho * (gm - 1.0) - (1.0 - eta);
    if (!(den > 0.0))
        throw analysis_error("scaling_critical_h: eta stays below the boundary for every h");
    return (1.0 - eta) / den;
}

void FamilyParams::validate() const {
    if (!(rho > 0.0 && rho <= 1.0)) throw domain_error("family: rho must lie in (0, 1]");
    if (family == PolyFamily::custom) throw domain_error("family: custom polynomials have no parameters");
    if (family != PolyFamily::scaling && tau < 1) throw domain_error("family: tau must be at least 1");
    if (family != PolyFamily::delay && !(gamma > 0.0 && mu > 0.0))
        throw domain_error("family: gamma and mu must be positive");
}

CharPoly FamilyParams::poly(double h, double eta) const {
    switch (family) {
    case PolyFamily::scaling: return char_poly_scaling(h, eta, rho, gamma, mu);
    case PolyFamily::delay: return char_poly_delay(h, eta, rho, tau);
    case PolyFamily::scaled_delay: return char_poly_scaled_delay(h, eta, rho, tau, gamma, mu);
    case PolyFamily::custom: break;
    }
    throw domain_error("family: custom polynomials have no parameters");
}

namespace {

// Shrinks [good, bad] (either order) around the stability switch and returns
// the last point known to be stable.
template <class Stable>
double bisect_edge(Stable&& stable, double good, double bad, double tol) {
    while (std::abs(bad - good) > tol) {
        const double mid = 0.5 * (good + bad);
        if (stable(mid)) good = mid; else bad = mid;
    }
    return good;
}

}  // namespace

BoundaryPoint eta_bar_at(const FamilyParams& fp, double h, const BoundaryOptions& opt) {
    fp.validate();
    if (!(h > 0.0)) throw domain_error("eta_bar_at: h must be positive");
    auto stable = [&](double eta) { return jury_stable(fp.poly(h, eta)); };

    const int n = std::max(opt.scan_points, 2);
    std::vector<double> grid(static_cast<std::size_t>(n));
    std::vector<char> ok(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = (i + 1.0) / (n + 1.0);
        ok[static_cast<std::size_t>(i)] = stable(grid[static_cast<std::size_t>(i)]);
    }

    // The scan stops short of 0 and 1; probe just inside each end so a switch
    // in the outermost cell is not missed.
    const double top = 1.0 - 1e-3 * opt.tol, bottom = 1e-3 * opt.tol;
    BoundaryPoint out;
    out.h = h;
    for (int i = 0; i < n;) {
        if (!ok[static_cast<std::size_t>(i)]) { ++i; continue; }
        int j = i;
        while (j + 1 < n && ok[static_cast<std::size_t>(j) + 1]) ++j;
        const double g_lo = grid[static_cast<std::size_t>(i)], g_hi = grid[static_cast<std::size_t>(j)];
        double lo = i > 0 ? bisect_edge(stable, g_lo, grid[static_cast<std::size_t>(i) - 1], opt.tol)
                    : stable(bottom) ? 0.0 : bisect_edge(stable, g_lo, bottom, opt.tol);
        double hi = j < n - 1 ? bisect_edge(stable, g_hi, grid[static_cast<std::size_t>(j) + 1], opt.tol)
                    : stable(top) ? 1.0 : bisect_edge(stable, g_hi, top, opt.tol);
        out.intervals.emplace_back(lo, hi);
        i = j + 1;
    }
    out.single_crossing = out.intervals.empty() ||
                          (out.intervals.size() == 1 && out.intervals.front().first == 0.0);
    out.eta_bar = (!out.intervals.empty() && out.intervals.front().first == 0.0) ? out.intervals.front().second : 0.0;
    return out;
}

StabilityBoundary boundary_curve(const FamilyParams& fp, const std::vector<double>& h_grid,
                                 const BoundaryOptions& opt) {
    fp.validate();
    for (std::size_t i = 0; i < h_grid.size(); ++i) {
        if (!(h_grid[i] > 0.0)) throw domain_error("boundary_curve: h grid must be positive");
        if (i > 0 && !(h_grid[i] > h_grid[i - 1])) throw domain_error("boundary_curve: h grid must ascend");
    }
    StabilityBoundary out;
    out.params = fp;
    out.samples.resize(h_grid.size());
    parallel_for(h_grid.size(), opt.workers, [&](std::size_t i) { out.samples[i] = eta_bar_at(fp, h_grid[i], opt); });
    for (std::size_t i = 1; i < out.samples.size(); ++i)
        if (out.samples[i].eta_bar > out.samples[i - 1].eta_bar + opt.tol) out.non_increasing = false;
    return out;
}

double critical_h(const FamilyParams& fp, double eta, double h_lo, double h_hi, double tol) {
    fp.validate();
    auto stable = [&](double h) { return jury_stable(fp.poly(h, eta)); };
    const bool s_lo = stable(h_lo), s_hi = stable(h_hi);
    if (s_lo == s_hi) throw analysis_error("critical_h: bracket does not straddle a stability switch");
    double good = s_lo ? h_lo : h_hi, bad = s_lo ? h_hi : h_lo;
    good = bisect_edge(stable, good, bad, tol);
    return good;
}

DelayLimitPoly delay_limit_polynomial(const mpq_class& rho, int tau) {
    if (tau < 2) throw domain_error("delay_limit_polynomial: tau must be at least 2");
    const RationalFunction one(QPoly::constant(1));
    const QPoly eta = QPoly::monomial(1, 1);
    RationalFunction X = one;
    RationalFunction Y(eta.scaled(2 * rho));
    RationalFunction Z(eta.scaled(2 * rho) * (QPoly::constant(1) - eta.scaled(2 * (1 - rho))));
    DelayLimitPoly out;
    for (int i = 0; i < tau - 2; ++i) {
        if (Y.num().is_zero()) throw analysis_error("delay_ros_limit: Y vanished identically");
        RationalFunction W = X * Z * Z / Y;
        X = X * X - Y * Y;
        Y = Z;
        Z = W;
        ++out.iterations;
    }
    RationalFunction Q = X * X - Y * Y - Z;
    out.Q = Q.num();
    out.den = Q.den();
    return out;
}

namespace {

// Integer coefficients proportional to p (ascending), for exact sign tests.
std::vector<mpz_class> integer_coeffs(const QPoly& p) {
    mpz_class l = 1;
    for (const auto& c : p.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
    std::vector<mpz_class> out;
    out.reserve(p.coeffs().size());
    for (const auto& c : p.coeffs()) out.push_back(c.get_num() * (l / c.get_den()));
    return out;
}

// Sign of p(a / b) with b > 0, computed as the sign of b^deg * p(a / b).
int sign_at(const std::vector<mpz_class>& c, const mpz_class& a, const mpz_class& b) {
    if (c.empty()) return 0;
    mpz_class acc = c.back(), bp = 1;
    for (std::size_t j = c.size() - 1; j-- > 0;) {
        bp *= b;
        acc = acc * a + c[j] * bp;
    }
    return sgn(acc);
}

}  // namespace

double min_root_unit_interval(const QPoly& p, const QPoly& den, int grid, double tol) {
    if (p.is_zero()) throw analysis_error("min_root_unit_interval: zero polynomial");
    const auto pc = integer_coeffs(p);
    const auto dc = integer_coeffs(den);
    const mpz_class N = grid;
    auto den_zero_between = [&](long i) {
        if (dc.size() <= 1) return false;
        int s0 = sign_at(dc, i, N), s1 = sign_at(dc, i + 1, N);
        return s0 == 0 || s1 == 0 || s0 != s1;
    };
    int prev = sign_at(pc, 0, N);
    for (long i = 0; i < grid; ++i) {
        const int next = sign_at(pc, i + 1, N);
        if (i == 0 && prev == 0) {
            prev = next;
            continue;  // the root at eta = 0 is not in the open interval
        }
        if (den_zero_between(i)) {
            prev = next;
            continue;
        }
        if (next == 0 && i + 1 < grid) return static_cast<double>(i + 1) / grid;
        if (prev != 0 && next != 0 && prev != next) {
            // Exact bisection on dyadic refinements of [i/N, (i+1)/N].
            mpq_class lo(mpz_class(i), N), hi(mpz_class(i + 1), N);
            const int s_lo = prev;
            while (mpq_class(hi - lo).get_d() > tol) {
                mpq_class mid = (lo + hi) / 2;
                const int s = sign_at(pc, mid.get_num(), mid.get_den());
                if (s == 0) return mid.get_d();
                if (s == s_lo) lo = mid; else hi = mid;
            }
            return mpq_class((lo + hi) / 2).get_d();
        }
        prev = next;
    }
    return 1.0;
}

double delay_ros_limit(const mpq_class& rho, int tau) {
    if (!(rho > 0 && rho <= 1)) throw domain_error("delay_ros_limit: rho must lie in (0, 1]");
    if (tau < 1) throw domain_error("delay_ros_limit: tau must be at least 1");
    if (rho <= mpq_class(1, 2)) return 1.0;
    if (tau == 1) return mpq_class(1 / (2 * rho)).get_d();
    const DelayLimitPoly d = delay_limit_polynomial(rho, tau);
    return min_root_unit_interval(d.Q, d.den);
}

double delay_ros_limit(double rho, int tau) { return delay_ros_limit(mpq_class(rho), tau); }

bool ros_nesting_check(double rho, int tau, const std::vector<double>& h_grid, const BoundaryOptions& opt) {
    FamilyParams a{PolyFamily::delay, rho, tau, 1.0, 1.0};
    FamilyParams b{PolyFamily::delay, rho, tau + 1, 1.0, 1.0};
    const auto ca = boundary_curve(a, h_grid, opt);
    const auto cb = boundary_curve(b, h_grid, opt);
    for (std::size_t i = 0; i < h_grid.size(); ++i)
        if (cb.samples[i].eta_bar > ca.samples[i].eta_bar + 1e-5) return false;
    return true;
}

}  // namespace rtp
