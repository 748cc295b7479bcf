#pragma once

#include "rtp/char_poly.hpp"

#include <complex>
#include <vector>

namespace rtp {

// All complex roots via eigenvalues of the balanced companion matrix.
// Leading zero coefficients are stripped; trailing zeros give exact roots at 0.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& descending);

struct RootCheck {
    bool inside = false;
    double max_modulus = 0.0;
};

RootCheck roots_in_unit_circle(const CharPoly& poly, double tol = 1e-9);

}  // namespace rtp
