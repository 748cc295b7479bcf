#include "rtp/jury.hpp"

#include <algorithm>
#include <cmath>

namespace rtp {

std::string to_string(JuryVerdict v) {
    switch (v) {
    case JuryVerdict::stable: return "stable";
    case JuryVerdict::unstable: return "unstable";
    case JuryVerdict::marginal: return "marginal";
    }
    return "?";
}

namespace {

enum class Sign { positive, negative, zero };

// Sign of x relative to a band of half-width tol*scale.
Sign classify(double x, double scale, double tol) {
    if (std::abs(x) <= tol * scale) return Sign::zero;
    return x > 0.0 ? Sign::positive : Sign::negative;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

JuryVerdict jury_test(const CharPoly& poly, JuryOptions opt) {
    poly.validate();
    // a[0] z^n + ... + a[n], leading coefficient made positive, unit max-norm.
    std::vector<double> a = poly.coeffs;
    const double s = (a.front() < 0.0 ? -1.0 : 1.0) / max_abs(a);
    for (double& x : a) x *= s;
    const std::size_t n = a.size() - 1;

    double p_one = 0.0, p_minus = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        p_one += a[i];
        p_minus += (i % 2 == 0 ? a[i] : -a[i]);  // (-1)^n P(-1)
        l1 += std::abs(a[i]);
    }

    bool marginal = false;
    auto require_positive = [&](double x, double scale) {
        switch (classify(x, scale, opt.tol)) {
        case Sign::positive: return true;
        case Sign::zero: marginal = true; return true;
        case Sign::negative: return false;
        }
        return false;
    };

    if (!require_positive(p_one, l1)) return JuryVerdict::unstable;
    if (!require_positive(p_minus, l1)) return JuryVerdict::unstable;
    if (!require_positive(a[0] - std::abs(a[n]), 1.0)) return JuryVerdict::unstable;
    if (marginal) return JuryVerdict::marginal;

    // Table rows: each new row has one entry fewer; the check is
    // |last| > |first| until the row is down to three entries.
    std::vector<double> v = a;
    while (v.size() > 3) {
        const std::size_t m = v.size() - 1;
        std::vector<double> w(m);
        for (std::size_t k = 0; k < m; ++k) w[k] = v[m] * v[k + 1] - v[0] * v[m - 1 - k];
        const double scale = max_abs(w);
        if (scale == 0.0) return JuryVerdict::marginal;
        for (double& x : w) x /= scale;
        switch (classify(std::abs(w[m - 1]) - std::abs(w[0]), 1.0, opt.tol)) {
        case Sign::positive: break;
        case Sign::zero: return JuryVerdict::marginal;
        case Sign::negative: return JuryVerdict::unstable;
        }
        v = std::move(w);
    }
    return JuryVerdict::stable;
}

bool jury_stable(const CharPoly& poly, JuryOptions opt) {
    return jury_test(poly, opt) == JuryVerdict::stable;
}

}  // namespace rtp
