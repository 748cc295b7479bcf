#include "rtp/roots.hpp"
#include "rtp/errors.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rtp {

namespace {

// Greedy power-of-two row/column scaling (Parlett-Reinsch) of the
// off-diagonal part.  Reduces the matrix norm without rounding error.
void balance(Eigen::MatrixXd& m) {
    Eigen::MatrixXd off = m;
    off.diagonal().setZero();
    const int n = static_cast<int>(m.rows());
    const double gamma = 0.9;
    bool changed;
    do {
        changed = false;
        for (int i = 0; i < n; ++i) {
            const double r = off.row(i).lpNorm<1>();
            const double c = off.col(i).lpNorm<1>();
            if (r == 0.0 || c == 0.0) continue;
            int e = 0;
            std::frexp(r / c, &e);
            e /= 2;
            if (e == 0) continue;
            if (std::ldexp(c, e) + std::ldexp(r, -e) < gamma * (c + r)) {
                changed = true;
                off.row(i) *= std::ldexp(1.0, -e);
                off.col(i) *= std::ldexp(1.0, e);
            }
        }
    } while (changed);
    off.diagonal() = m.diagonal();
    m = off;
}

}  // namespace

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& descending) {
    std::size_t first = 0;
    while (first < descending.size() && descending[first] == 0.0) ++first;
    std::size_t last = descending.size();
    std::vector<std::complex<double>> roots;
    while (last > first + 1 && descending[last - 1] == 0.0) {
        --last;
        roots.emplace_back(0.0, 0.0);
    }
    const int deg = static_cast<int>(last - first) - 1;
    if (deg <= 0) return roots;
    const double lead = descending[first];
    if (deg == 1) {
        roots.emplace_back(-descending[first + 1] / lead, 0.0);
        return roots;
    }
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(deg, deg);
    c.diagonal(-1).setOnes();
    // Last column holds -a_deg, ..., -a_1 (monic) from top to bottom.
    for (int i = 0; i < deg; ++i) c(i, deg - 1) = -descending[last - 1 - i] / lead;
    if (!c.allFinite()) throw analysis_error("polynomial_roots: non-finite companion matrix");
    balance(c);
    Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
    if (es.info() != Eigen::Success)
        throw analysis_error("polynomial_roots: eigenvalue iteration did not converge (degree " +
                             std::to_string(deg) + ")");
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
    return roots;
}

RootCheck roots_in_unit_circle(const CharPoly& poly, double tol) {
    poly.validate();
    RootCheck out;
    for (const auto& r : polynomial_roots(poly.coeffs)) out.max_modulus = std::max(out.max_modulus, std::abs(r));
    out.inside = out.max_modulus < 1.0 - tol;
    return out;
}

}  // namespace rtp
