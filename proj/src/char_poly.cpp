#include "rtp/char_poly.hpp"
#include "rtp/errors.hpp"

#include <cmath>

namespace rtp {

std::string to_string(PolyFamily f) {
    switch (f) {
    case PolyFamily::scaling: return "scaling";
    case PolyFamily::delay: return "delay";
    case PolyFamily::scaled_delay: return "scaled_delay";
    case PolyFamily::custom: return "custom";
    }
    return "?";
}

double CharPoly::operator()(double z) const {
    double acc = 0.0;
    for (double c : coeffs) acc = acc * z + c;
    return acc;
}

void CharPoly::validate() const {
    if (coeffs.size() < 2) throw domain_error("CharPoly: degree must be at least 1");
    if (coeffs.front() == 0.0) throw domain_error("CharPoly: leading coefficient is zero");
    for (double c : coeffs)
        if (!std::isfinite(c)) throw domain_error("CharPoly: non-finite coefficient");
}

CharPoly make_poly(std::vector<double> coeffs) {
    CharPoly p;
    p.coeffs = std::move(coeffs);
    p.validate();
    return p;
}

CharPoly char_poly_scaling(double h, double eta, double rho, double gamma, double mu) {
    CharPoly p;
    p.coeffs = {h + 1.0, 2.0 * eta * (1.0 + rho * gamma * mu * h + h - rho * h) - (h + 1.0)};
    p.origin = {PolyFamily::scaling, h, eta, rho, gamma, mu, 0};
    p.validate();
    return p;
}

CharPoly char_poly_scaled_delay(double h, double eta, double rho, int tau, double gamma, double mu) {
    if (tau < 1) throw domain_error("char_poly: tau must be at least 1");
    CharPoly p;
    p.coeffs.assign(static_cast<std::size_t>(tau) + 2, 0.0);
    p.coeffs[0] = h + 1.0;
    p.coeffs[1] = 2.0 * eta + 2.0 * eta * (1.0 - rho) * h - h - 1.0;
    p.coeffs.back() = 2.0 * eta * rho * h * gamma * mu;
    p.origin = {PolyFamily::scaled_delay, h, eta, rho, gamma, mu, tau};
    p.validate();
    return p;
}

CharPoly char_poly_delay(double h, double eta, double rho, int tau) {
    CharPoly p = char_poly_scaled_delay(h, eta, rho, tau, 1.0, 1.0);
    p.origin.family = PolyFamily::delay;
    return p;
}

}  // namespace rtp
