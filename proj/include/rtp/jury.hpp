#pragma once

#include "rtp/char_poly.hpp"

#include <string>

namespace rtp {

enum class JuryVerdict { stable, unstable, marginal };

std::string to_string(JuryVerdict v);

struct JuryOptions {
    // Relative band around zero inside which a table comparison is called
    // marginal instead of being decided.
    double tol = 1e-12;
};

JuryVerdict jury_test(const CharPoly& poly, JuryOptions opt = {});

// True only for a clear "stable" verdict.
bool jury_stable(const CharPoly& poly, JuryOptions opt = {});

}  // namespace rtp
