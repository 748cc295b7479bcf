#include "rtp/attacks.hpp"
#include "rtp/char_poly.hpp"
#include "rtp/errors.hpp"
#include "rtp/jury.hpp"
#include "rtp/ratpoly.hpp"
#include "rtp/roots.hpp"
#include "rtp/stability.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace rtp;

namespace {

struct Sample {
    double h, eta, rho;
    int tau;
};

Sample draw(std::mt19937_64& rng, double rho_hi) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Sample s;
    s.h = 100.0 * (1.0 - u(rng));  // (0, 100]
    s.eta = u(rng);
    while (s.eta == 0.0) s.eta = u(rng);
    s.rho = rho_hi * (1.0 - u(rng));  // (0, rho_hi]
    s.tau = std::uniform_int_distribution<int>(1, 20)(rng);
    return s;
}

}  // namespace

TEST_CASE("scaling characteristic polynomial") {
    auto p = char_poly_scaling(1.0, 0.5, 1.0, 1.0, 1.0);
    REQUIRE(p.coeffs.size() == 2);
    CHECK(p.coeffs[0] == 2.0);
    CHECK(p.coeffs[1] == doctest::Approx(0.0).epsilon(1e-15));

    const double mu = mu_ceo(0.57, -0.8);
    p = char_poly_scaling(1.0, 0.8, 1.0, 0.57, mu);
    CHECK(p.coeffs[0] == 2.0);
    // 2 * 0.8 * (1 + 0.57^0.2 ... ) - 2 with gamma*mu = 0.57^-0.8, 40 digits
    CHECK(p.coeffs[1] == doctest::Approx(2.10853461459484).epsilon(1e-13));
    CHECK(std::abs(p.coeffs[1] - 2.1088) < 5e-4);
    CHECK(p.origin.family == PolyFamily::scaling);
    CHECK(p.origin.gamma == 0.57);
}

TEST_CASE("delay characteristic polynomial") {
    auto p = char_poly_delay(1.0, 0.2, 1.0, 1);
    REQUIRE(p.coeffs.size() == 3);
    CHECK(p.coeffs[0] == 2.0);
    CHECK(p.coeffs[1] == doctest::Approx(-1.6).epsilon(1e-15));
    CHECK(p.coeffs[2] == doctest::Approx(0.4).epsilon(1e-15));

    p = char_poly_delay(3.0, 0.3, 0.7, 9);
    CHECK(p.degree() == 10);
    int nonzero = 0;
    for (double c : p.coeffs) nonzero += c != 0.0;
    CHECK(nonzero == 3);
    CHECK(p.coeffs[0] == 4.0);

    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const auto s = draw(rng, 1.0);
        const auto d = char_poly_delay(s.h, s.eta, s.rho, s.tau);
        const auto sd = char_poly_scaled_delay(s.h, s.eta, s.rho, s.tau, 1.0, 1.0);
        REQUIRE(d.coeffs.size() == sd.coeffs.size());
        for (std::size_t j = 0; j < d.coeffs.size(); ++j) CHECK(d.coeffs[j] == sd.coeffs[j]);
    }
    const auto sd = char_poly_scaled_delay(2.0, 0.4, 0.8, 3, 0.6, mu_ceo(0.6, -0.8));
    CHECK(sd.coeffs.back() == doctest::Approx(2 * 0.4 * 0.8 * 2.0 * 0.6 * mu_ceo(0.6, -0.8)));
}

TEST_CASE("delay polynomial around the tau = 12 threshold") {
    CHECK_FALSE(roots_in_unit_circle(char_poly_delay(1.50, 0.2, 1.0, 12)).inside);
    CHECK_FALSE(jury_stable(char_poly_delay(1.50, 0.2, 1.0, 12)));
    CHECK(roots_in_unit_circle(char_poly_delay(1.40, 0.2, 1.0, 12)).inside);
    CHECK(jury_stable(char_poly_delay(1.40, 0.2, 1.0, 12)));
}

TEST_CASE("jury test on small polynomials") {
    CHECK(jury_test(make_poly({1.0, -0.5})) == JuryVerdict::stable);
    CHECK(jury_test(make_poly({1.0, -2.0, 1.5})) == JuryVerdict::unstable);
    CHECK(jury_test(make_poly({1.0, -1.0})) == JuryVerdict::marginal);
    CHECK(jury_test(make_poly({1.0, 0.0, 1.0})) != JuryVerdict::stable);
    CHECK(jury_test(make_poly({2.0, -1.6, 0.4})) == JuryVerdict::stable);
    CHECK(jury_test(make_poly({1.0, 0.0, 0.0, 0.0, 0.0, 0.0})) == JuryVerdict::stable);
    // Roots 0.5, -0.9, 1.1
    CHECK(jury_test(make_poly({1.0, -0.7, -1.04, 0.495})) == JuryVerdict::unstable);
    // Roots 0.5, -0.9, 0.95 i, -0.95 i
    CHECK(jury_test(make_poly({1.0, 0.4, 0.4525, 0.36100, -0.406125})) == JuryVerdict::stable);
    CHECK_THROWS_AS(make_poly({0.0, 1.0}), domain_error);
    CHECK_THROWS_AS(make_poly({1.0}), domain_error);
}

TEST_CASE("root oracle") {
    auto r = roots_in_unit_circle(make_poly({2.0, -1.6, 0.4}));
    CHECK(r.inside);
    CHECK(r.max_modulus == doctest::Approx(0.447213595499958).epsilon(1e-12));  // |0.4 +- 0.2i|
    r = roots_in_unit_circle(make_poly({1.0, 0.0, 0.0, 0.0, 0.0, 0.0}));
    CHECK(r.max_modulus == 0.0);
    r = roots_in_unit_circle(make_poly({1.0, -2.0, 1.5}));
    CHECK(r.max_modulus == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
    CHECK_FALSE(r.inside);

    const auto roots = polynomial_roots({1.0, -6.0, 11.0, -6.0});
    REQUIRE(roots.size() == 3);
    std::vector<double> re;
    for (auto z : roots) {
        CHECK(std::abs(z.imag()) < 1e-9);
        re.push_back(z.real());
    }
    std::sort(re.begin(), re.end());
    CHECK(re[0] == doctest::Approx(1.0));
    CHECK(re[1] == doctest::Approx(2.0));
    CHECK(re[2] == doctest::Approx(3.0));
}

TEST_CASE("jury agrees with the root oracle on random attack polynomials") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> g(0.05, 2.0);
    int compared = 0, disagree = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto s = draw(rng, 1.0);
        CharPoly p;
        switch (i % 3) {
        case 0: p = char_poly_delay(s.h, s.eta, s.rho, s.tau); break;
        case 1: {
            const double gamma = g(rng);
            p = char_poly_scaled_delay(s.h, s.eta, s.rho, s.tau, gamma, mu_ceo(gamma, -0.8));
            break;
        }
        default: {
            const double gamma = g(rng);
            p = char_poly_scaling(s.h, s.eta, s.rho, gamma, mu_ceo(gamma, -0.8));
        }
        }
        const auto oracle = roots_in_unit_circle(p, 0.0);
        if (std::abs(oracle.max_modulus - 1.0) <= 1e-6) continue;
        ++compared;
        const bool j = jury_stable(p);
        if (j != (oracle.max_modulus < 1.0)) ++disagree;
    }
    CHECK(compared > 9900);
    CHECK(disagree == 0);
}

TEST_CASE("delay family with at most half the meters is always stable") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10000; ++i) {
        const auto s = draw(rng, 0.5);
        const auto p = char_poly_delay(s.h, s.eta, s.rho, s.tau);
        const auto r = roots_in_unit_circle(p, 0.0);
        CAPTURE(s.h);
        CAPTURE(s.eta);
        CAPTURE(s.rho);
        CAPTURE(s.tau);
        REQUIRE(r.max_modulus < 1.0);
    }
}

TEST_CASE("sum-of-squares function is positive and increasing outside the unit circle") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 10000; ++i) {
        const auto s = draw(rng, 0.5);
        const double u1 = s.h + 1.0;
        const double u2 = 2 * s.eta + 2 * s.eta * (1 - s.rho) * s.h - s.h - 1.0;
        const double u3 = 2 * s.eta * s.rho * s.h;
        const int t = s.tau;
        for (auto z : polynomial_roots(char_poly_delay(s.h, s.eta, s.rho, s.tau).coeffs)) {
            if (std::abs(z) == 0.0) continue;
            const double c = std::cos(std::arg(z));
            auto g = [&](double A) {
                return u1 * u1 * std::pow(A, 2 * t + 2) + 2 * u1 * u2 * c * std::pow(A, 2 * t + 1) +
                       u2 * u2 * std::pow(A, 2 * t) - u3 * u3;
            };
            auto dg = [&](double A) {
                return (2 * t + 2) * u1 * u1 * std::pow(A, 2 * t + 1) +
                       (2 * t + 1) * 2 * u1 * u2 * c * std::pow(A, 2 * t) + 2 * t * u2 * u2 * std::pow(A, 2 * t - 1);
            };
            CHECK(g(1.0) > 0.0);
            bool increasing = true;
            for (double A = 1.0; A <= 3.0; A += 0.25) increasing = increasing && dg(A) > 0.0;
            CHECK(increasing);
        }
    }
}

TEST_CASE("scaling closed form matches the jury test") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double h = 0.01 + 100.0 * u(rng), eta = 0.001 + 0.998 * u(rng), rho = 0.01 + 0.99 * u(rng);
        const double gamma = 0.05 + 2.0 * u(rng);
        const double mu = mu_ceo(gamma, -0.2 - 0.7 * u(rng));
        const double bar = std::min(1.0, scaling_eta_bar(h, rho, gamma, mu));
        if (std::abs(eta - bar) < 1e-9) continue;
        CHECK(jury_stable(char_poly_scaling(h, eta, rho, gamma, mu)) == (eta < bar));
    }
}

TEST_CASE("scaling boundary values") {
    for (double h : {0.1, 1.0, 50.0}) CHECK(scaling_eta_bar(h, 0.7, 0.5, 2.0) == 1.0);
    // (h+1)/(h+1+rho h (gamma mu - 1))
    CHECK(scaling_eta_bar(2.0, 0.5, 0.5, 4.0) == doctest::Approx(3.0 / 4.0));
    CHECK(scaling_critical_h(0.8, 1.0, 0.57, mu_ceo(0.57, -0.8)) == doctest::Approx(0.786573791675300).epsilon(1e-12));
    CHECK(scaling_critical_h(0.8, 1.0, 0.59, mu_ceo(0.59, -0.8)) == doctest::Approx(0.908527689556902).epsilon(1e-12));
    CHECK(std::abs(scaling_critical_h(0.8, 1.0, 0.57, mu_ceo(0.57, -0.8)) - 0.786) <= 0.001);
    CHECK(std::abs(scaling_critical_h(0.8, 1.0, 0.59, mu_ceo(0.59, -0.8)) - 0.908) <= 0.001);
    CHECK_THROWS(scaling_critical_h(0.8, 1.0, 1.5, mu_ceo(1.5, -0.8)));
}

TEST_CASE("scaling ROS limit") {
    CHECK(scaling_ros_limit(1.0, 0.5, mu_ceo(0.5, -0.8)) == doctest::Approx(0.574349177498518).epsilon(1e-13));
    CHECK(std::abs(scaling_ros_limit(1.0, 0.5, mu_ceo(0.5, -0.8)) - 0.5743) < 1e-4);
    for (double g : {1.0, 1.3, 4.0}) CHECK(scaling_ros_limit(0.8, g, mu_ceo(g, -0.8)) == 1.0);
    CHECK(scaling_ros_limit(1e-9, 0.2, mu_ceo(0.2, -0.8)) == doctest::Approx(1.0).epsilon(1e-6));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double rho = 0.01 + 0.99 * u(rng), gamma = 0.05 + 0.9 * u(rng);
        const double mu = mu_ceo(gamma, -0.8);
        CHECK(scaling_ros_limit(rho, gamma, mu) == doctest::Approx(scaling_eta_bar(1e10, rho, gamma, mu)).epsilon(1e-9));
        FamilyParams fp{PolyFamily::scaling, rho, 1, gamma, mu};
        BoundaryOptions opt;
        opt.tol = 1e-7;
        CHECK(std::abs(eta_bar_at(fp, 1e10, opt).eta_bar - scaling_ros_limit(rho, gamma, mu)) < 1e-4);
    }
}

TEST_CASE("scaling boundary shrinks with rho and gamma mu") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double h = 0.01 + 50.0 * u(rng);
        const double r1 = 0.01 + 0.98 * u(rng), r2 = r1 + (1.0 - r1) * u(rng);
        const double gm1 = 1.0 + 3.0 * u(rng), gm2 = gm1 + 3.0 * u(rng);
        CHECK(scaling_eta_bar(h, r2, 1.0, gm1) <= scaling_eta_bar(h, r1, 1.0, gm1));
        CHECK(scaling_eta_bar(h, r1, 1.0, gm2) <= scaling_eta_bar(h, r1, 1.0, gm1));
    }
}

TEST_CASE("delay stability switches in h at eta 0.2") {
    const FamilyParams tau12{PolyFamily::delay, 1.0, 12};
    const FamilyParams tau11{PolyFamily::delay, 1.0, 11};
    // Independent 40-digit polynomial-root bisection gives 1.4432185573.
    CHECK(critical_h(tau12, 0.2, 1.0, 2.0) == doctest::Approx(1.4432185573).epsilon(1e-8));
    const double h11 = critical_h(tau11, 0.2, 1.0, 2.0);
    CHECK(std::abs(h11 - 1.522) <= 0.002);
    CHECK_THROWS_AS(critical_h(tau12, 0.2, 0.1, 0.2), analysis_error);
}

TEST_CASE("delay stability switch for tau 12 at 1.447" * doctest::may_fail()) {
    const FamilyParams tau12{PolyFamily::delay, 1.0, 12};
    CHECK(std::abs(critical_h(tau12, 0.2, 1.0, 2.0) - 1.447) <= 0.002);
}

TEST_CASE("boundary curve for the delay family") {
    const FamilyParams fp{PolyFamily::delay, 1.0, 12};
    std::vector<double> grid;
    for (double h = 1.0; h <= 2.0; h += 0.05) grid.push_back(h);
    const auto curve = boundary_curve(fp, grid);
    REQUIRE(curve.samples.size() == grid.size());
    CHECK(curve.non_increasing);
    // The curve crosses 0.2 between the samples that straddle the switch.
    for (const auto& s : curve.samples) {
        if (s.h < 1.44) CHECK(s.eta_bar > 0.2);
        if (s.h > 1.45) CHECK(s.eta_bar < 0.2);
        CHECK(s.single_crossing);
    }

    const FamilyParams half{PolyFamily::delay, 0.5, 20};
    for (const auto& s : boundary_curve(half, {0.1, 1.0, 10.0, 100.0, 1000.0}).samples) CHECK(s.eta_bar == 1.0);
    for (int tau = 1; tau <= 20; tau += 3) {
        const FamilyParams f{PolyFamily::delay, 0.5, tau};
        CHECK(eta_bar_at(f, 37.0).eta_bar == 1.0);
    }
}

TEST_CASE("boundary curve does not depend on the worker count") {
    const FamilyParams fp{PolyFamily::delay, 0.8, 5};
    std::vector<double> grid;
    for (int i = 0; i < 30; ++i) grid.push_back(0.05 * std::pow(1.3, i));
    BoundaryOptions one, many;
    many.workers = 4;
    const auto a = boundary_curve(fp, grid, one);
    const auto b = boundary_curve(fp, grid, many);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(a.samples[i].eta_bar == b.samples[i].eta_bar);
}

TEST_CASE("superimposed attack boundary lies below the pure delay boundary") {
    const double mu = mu_ceo(0.6, -0.8);
    const FamilyParams sd{PolyFamily::scaled_delay, 1.0, 1, 0.6, mu};
    const FamilyParams d{PolyFamily::delay, 1.0, 1};
    // For small h both boundaries sit at the top of (0, 1).
    CHECK(eta_bar_at(sd, 0.1).eta_bar == 1.0);
    CHECK(eta_bar_at(d, 0.1).eta_bar == 1.0);
    for (double h : {0.5, 0.9, 1.01, 1.5, 2.0, 5.0, 10.0, 100.0, 1e4}) CHECK(eta_bar_at(sd, h).eta_bar < eta_bar_at(d, h).eta_bar);
    for (double h : {1.5, 10.0, 1e4}) {
        // Closed forms from |a0| < a2: (h+1)/(2h) and (h+1)/(2 h gamma mu).
        CHECK(eta_bar_at(d, h).eta_bar == doctest::Approx((h + 1) / (2 * h)).epsilon(1e-4));
        CHECK(eta_bar_at(sd, h).eta_bar == doctest::Approx((h + 1) / (2 * h * 0.6 * mu)).epsilon(1e-4));
    }
}

TEST_CASE("delay ROS limit") {
    CHECK(delay_ros_limit(1.0, 1) == 0.5);
    CHECK(delay_ros_limit(0.6, 1) == doctest::Approx(1.0 / 1.2).epsilon(1e-15));
    CHECK(delay_ros_limit(0.5, 7) == 1.0);
    CHECK(delay_ros_limit(0.3, 2) == 1.0);
    for (int tau = 2; tau <= 8; ++tau) {
        // At rho = 1 the limit is sin(pi / (2 (2 tau + 1))).
        const double expected = std::sin(std::numbers::pi / (2.0 * (2 * tau + 1)));
        CHECK(delay_ros_limit(1.0, tau) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("delay ROS limit matches the jury boundary at h = 1e10") {
    BoundaryOptions opt;
    opt.tol = 1e-7;
    for (double rho : {0.6, 0.75, 0.9, 1.0}) {
        for (int tau = 1; tau <= 8; ++tau) {
            const FamilyParams fp{PolyFamily::delay, rho, tau};
            CAPTURE(rho);
            CAPTURE(tau);
            CHECK(std::abs(delay_ros_limit(rho, tau) - eta_bar_at(fp, 1e10, opt).eta_bar) < 1e-4);
        }
    }
}

TEST_CASE("delay ROS limit shrinks with rho and tau") {
    for (int tau = 1; tau <= 8; ++tau) {
        double prev = 2.0;
        for (double rho : {0.55, 0.65, 0.75, 0.85, 1.0}) {
            const double v = delay_ros_limit(rho, tau);
            CHECK(v <= prev);
            prev = v;
        }
    }
    for (double rho : {0.6, 0.8, 1.0}) {
        double prev = 2.0;
        for (int tau = 1; tau <= 8; ++tau) {
            const double v = delay_ros_limit(rho, tau);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("exact reduction polynomial") {
    const auto r = delay_limit_polynomial(mpq_class(1), 2);
    CHECK(r.iterations == 0);
    CHECK(min_root_unit_interval(r.Q, r.den) == doctest::Approx(std::sin(std::numbers::pi / 10.0)).epsilon(1e-9));
    const auto r5 = delay_limit_polynomial(mpq_class(3, 4), 5);
    CHECK(r5.iterations == 3);
    CHECK(delay_ros_limit(mpq_class(3, 4), 5) == delay_ros_limit(0.75, 5));
}

TEST_CASE("nesting in tau") {
    const std::vector<double> grid{0.1, 1.0, 10.0, 100.0};
    for (double rho : {0.5, 0.75, 1.0}) {
        for (int tau = 1; tau <= 6; ++tau) CHECK(ros_nesting_check(rho, tau, grid));
    }
}

TEST_CASE("rational polynomial arithmetic") {
    const QPoly x = QPoly::monomial(1, 1);
    const QPoly one = QPoly::constant(1);
    const QPoly a = (x - one) * (x + one);  // x^2 - 1
    CHECK(a.degree() == 2);
    CHECK(a.coeff(0) == -1);
    CHECK(a.coeff(1) == 0);
    CHECK(a.eval(mpq_class(3)) == 8);
    CHECK(a.sign_at(mpq_class(1, 2)) == -1);
    CHECK(a.sign_at(mpq_class(1)) == 0);

    QPoly rem;
    const QPoly q = a.divmod(x - one, rem);
    CHECK(rem.is_zero());
    CHECK(q == x + one);

    const QPoly g = poly_gcd(a * (x + QPoly::constant(2)), (x - one) * (x - QPoly::constant(5)));
    CHECK(g == (x - one));

    const RationalFunction f(a, (x - one).scaled(3));
    CHECK(f.is_polynomial());
    CHECK(f.num() == (x + one).scaled(mpq_class(1, 3)));
    const RationalFunction h = RationalFunction(one) / RationalFunction(x + one);
    const RationalFunction s = h + h;
    CHECK(s.num() == QPoly::constant(2));
    CHECK(s.den() == x + one);
    CHECK((s * RationalFunction(x + one)).is_polynomial());
    CHECK((s - s).num().is_zero());
    CHECK(a.str() == "x^2 - 1");
}
