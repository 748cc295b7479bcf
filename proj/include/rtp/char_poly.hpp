#pragma once

#include <string>
#include <vector>

namespace rtp {

enum class PolyFamily { scaling, delay, scaled_delay, custom };

std::string to_string(PolyFamily f);

struct PolyOrigin {
    PolyFamily family = PolyFamily::custom;
    double h = 0.0;
    double eta = 0.0;
    double rho = 0.0;
    double gamma = 1.0;
    double mu = 1.0;
    int tau = 0;
};

// Real polynomial, coefficients in descending powers of z.
struct CharPoly {
    std::vector<double> coeffs;
    PolyOrigin origin;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double operator()(double z) const;
    void validate() const;
};

CharPoly make_poly(std::vector<double> coeffs);

CharPoly char_poly_scaling(double h, double eta, double rho, double gamma, double mu);
CharPoly char_poly_delay(double h, double eta, double rho, int tau);
CharPoly char_poly_scaled_delay(double h, double eta, double rho, int tau, double gamma, double mu);

}  // namespace rtp
